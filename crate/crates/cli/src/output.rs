//! CSV rendering of a scan's residual curve.

use num_rational::BigRational;
use num_traits::One;
use sasaki_core::arith::{ceil, sign, to_decimal};
use sasaki_core::cone::ScanReport;

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 3] = ["t", "sign", "approx"];
const CSV_DIGITS: usize = 12;

/// Right end of the sampled range: the smallest integer at least twice the
/// excluded slope and every root, and at least 1.
fn sample_range(scan: &ScanReport) -> BigRational {
    let two = BigRational::from_integer(2.into());
    let mut top = BigRational::one();
    let mut bump = |x: &BigRational| {
        let y = x * &two;
        if y > top {
            top = y;
        }
    };
    bump(&scan.ray_function.excluded_t);
    for r in &scan.roots {
        bump(r.isolating_interval.hi());
    }
    BigRational::from_integer(ceil(&top))
}

/// Sample points `t_k = (2k - 1) T / (2 samples)`, shifted by a quarter step
/// if one lands on `t = w2/w1`.
pub fn sample_points(scan: &ScanReport, samples: usize) -> Vec<BigRational> {
    let top = sample_range(scan);
    let n = BigRational::from_integer((4 * samples).into());
    (1..=samples)
        .map(|k| {
            let t = BigRational::from_integer((4 * k - 2).into()) * &top / &n;
            if t == scan.ray_function.excluded_t {
                BigRational::from_integer((4 * k - 3).into()) * &top / &n
            } else {
                t
            }
        })
        .collect()
}

/// Rows `(t, sign of the residual numerator, numerator value)` with header
/// `t,sign,approx` and LF line endings.
pub fn emit_csv(scan: &ScanReport, samples: usize) -> CliResult<String> {
    if samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    wtr.write_record(CSV_HEADER).map_err(io)?;
    for t in sample_points(scan, samples) {
        let value = scan.ray_function.numerator.eval(&t);
        wtr.write_record([
            to_decimal(&t, CSV_DIGITS),
            sign(&value).to_string(),
            to_decimal(&value, CSV_DIGITS),
        ])
        .map_err(io)?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}
