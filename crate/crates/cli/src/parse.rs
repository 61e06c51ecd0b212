use crate::output::{CliError, CliResult};
use hammock_core::personalization::log_grid;
use hammock_core::JumpSpec;

fn bad(what: &str, text: &str) -> CliError {
    CliError::InvalidConfig(format!("cannot parse {what} `{text}`"))
}

/// `lo..hi[..step]` (inclusive) or a single value.
pub fn int_range(text: &str) -> CliResult<Vec<u32>> {
    let parts: Vec<&str> = text.split("..").collect();
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad("range", text));
    let (lo, hi, step) = match parts.as_slice() {
        [v] => (num(v)?, num(v)?, 1),
        [lo, hi] => (num(lo)?, num(hi)?, 1),
        [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
        _ => return Err(bad("range", text)),
    };
    if step == 0 || lo > hi {
        return Err(bad("range", text));
    }
    Ok((lo..=hi).step_by(step as usize).collect())
}

/// `min..max` rating scale.
pub fn scale(text: &str) -> CliResult<(u8, u8)> {
    match text.split_once("..") {
        Some((a, b)) => Ok((
            a.trim().parse().map_err(|_| bad("scale", text))?,
            b.trim().parse().map_err(|_| bad("scale", text))?,
        )),
        None => Err(bad("scale", text)),
    }
}

/// `log:lo..hi..count` or comma-separated probabilities.
pub fn p_grid(text: &str) -> CliResult<Vec<f64>> {
    if let Some(spec) = text.strip_prefix("log:") {
        let parts: Vec<&str> = spec.split("..").collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(bad("grid", text));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad("grid", text))?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad("grid", text))?;
        let count: usize = count.trim().parse().map_err(|_| bad("grid", text))?;
        if !(lo > 0.0 && hi > lo) {
            return Err(bad("grid", text));
        }
        return Ok(log_grid(lo, hi, count));
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad("grid", text)))
        .collect()
}

pub fn jump(text: &str) -> CliResult<JumpSpec> {
    if text.eq_ignore_ascii_case("skip") {
        return Ok(JumpSpec::skip());
    }
    let w: u32 = text.trim().parse().map_err(|_| bad("width", text))?;
    JumpSpec::hammock(w).map_err(CliError::from)
}

pub fn id_list(text: &str) -> CliResult<Vec<u32>> {
    text.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| bad("ID list", text)))
        .collect()
}
