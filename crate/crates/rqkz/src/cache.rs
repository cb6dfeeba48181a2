use std::collections::HashMap;
use std::sync::RwLock;

use rqkz_core::rsolve::{RCache, RKey};
use rqkz_core::Mat;

/// R-operator cache shared between worker threads.
#[derive(Default)]
pub struct SharedCache {
    map: RwLock<HashMap<RKey, Mat>>,
}

impl SharedCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl RCache for SharedCache {
    fn get(&self, key: &RKey) -> Option<Mat> {
        self.map.read().ok()?.get(key).cloned()
    }

    fn put(&self, key: RKey, value: Mat) {
        if let Ok(mut m) = self.map.write() {
            m.entry(key).or_insert(value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rayon::prelude::*;
    use rqkz_core::repkit::{build_eval_rep, GradingChoice, SiteKind};
    use rqkz_core::rsolve::{NoCache, Normalization, RFamily};
    use rqkz_core::{QContext, C};

    #[test]
    fn concurrent_fills_match_uncached_solves() {
        let ctx = QContext::new(C::new(0.7, 0.0)).unwrap();
        let rep = build_eval_rep(2, GradingChoice::symmetric(), &ctx);
        let cache = SharedCache::new();
        let points: Vec<C> = (0..8)
            .map(|k| C::from_polar(0.8 + 0.1 * k as f64, 0.3 * k as f64))
            .collect();
        let cached: Vec<Mat> = points
            .par_iter()
            .chain(points.par_iter())
            .map(|&z| {
                let f = RFamily::new(&rep, C::new(0.0, 0.0), Normalization::Hw, &cache);
                f.r(SiteKind::V, z, SiteKind::VDual, C::new(1.0, 0.0)).unwrap()
            })
            .collect();
        assert!(cache.len() >= 8);
        let f = RFamily::new(&rep, C::new(0.0, 0.0), Normalization::Hw, &NoCache);
        for (k, &z) in points.iter().enumerate() {
            let fresh = f.r(SiteKind::V, z, SiteKind::VDual, C::new(1.0, 0.0)).unwrap();
            assert_eq!(cached[k], fresh);
            assert_eq!(cached[k + 8], fresh);
        }
    }
}
