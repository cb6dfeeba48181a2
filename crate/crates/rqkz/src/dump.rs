//! Matrix dumps: `{site_dims_out, site_dims_in, data}` with `data` the
//! row-major list of `[re, im]` entries.

use rqkz_core::tensorops::TensorOperator;
use rqkz_core::{Mat, C};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::report::to_exact_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub site_dims_out: Vec<usize>,
    pub site_dims_in: Vec<usize>,
    pub data: Vec<[f64; 2]>,
}

impl MatrixDump {
    pub fn from_operator(op: &TensorOperator) -> Self {
        let m = &op.data;
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| [m[(i, j)].re, m[(i, j)].im]))
            .collect();
        Self {
            site_dims_out: op.site_dims_out.clone(),
            site_dims_in: op.site_dims_in.clone(),
            data,
        }
    }

    pub fn to_operator(&self) -> Result<TensorOperator, CliError> {
        let rows: usize = self.site_dims_out.iter().product();
        let cols: usize = self.site_dims_in.iter().product();
        if self.data.len() != rows * cols {
            return Err(CliError::Config(format!(
                "dump holds {} entries, dims need {}",
                self.data.len(),
                rows * cols
            )));
        }
        let data = Mat::from_fn(rows, cols, |i, j| {
            let [re, im] = self.data[i * cols + j];
            C::new(re, im)
        });
        Ok(TensorOperator::new(
            self.site_dims_out.clone(),
            self.site_dims_in.clone(),
            data,
        )?)
    }

    pub fn to_json(&self) -> String {
        to_exact_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(s)?)
    }
}
