pub mod fit;
pub mod sim;
pub mod toy;
pub mod weights;

use crate::config::ConfigError;

/// Parses a comma-separated list of numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| ConfigError(format!("bad number '{p}' in list: {e}"))))
        .collect()
}
