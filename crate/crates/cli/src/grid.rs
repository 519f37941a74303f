//! η-grid syntax: `min:max:steps`, a comma list, or a single value.

use anyhow::{bail, Context, Result};

use anyon_entropy::spectrum::eta_grid;

pub fn parse_grid(input: &str, log: bool) -> Result<Vec<f64>> {
    let input = input.trim();
    if input.contains(':') {
        let parts: Vec<&str> = input.split(':').collect();
        if parts.len() != 3 {
            bail!("expected min:max:steps, got {input:?}");
        }
        let min: f64 = parts[0]
            .trim()
            .parse()
            .with_context(|| format!("bad minimum in {input:?}"))?;
        let max: f64 = parts[1]
            .trim()
            .parse()
            .with_context(|| format!("bad maximum in {input:?}"))?;
        let steps: usize = parts[2]
            .trim()
            .parse()
            .with_context(|| format!("bad step count in {input:?}"))?;
        Ok(eta_grid(min, max, steps, log)?)
    } else {
        let values = input
            .split(',')
            .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad η value {v:?}")))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            bail!("empty η grid");
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            bail!("η values must be finite and non-negative");
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            bail!("η values must be strictly increasing");
        }
        Ok(values)
    }
}

pub fn parse_state(input: &str) -> Result<(usize, usize)> {
    let (j, i) = input
        .split_once(',')
        .with_context(|| format!("expected j,i, got {input:?}"))?;
    Ok((
        j.trim().parse().with_context(|| format!("bad index {j:?}"))?,
        i.trim().parse().with_context(|| format!("bad index {i:?}"))?,
    ))
}

pub fn parse_list(input: &str) -> Result<Vec<usize>> {
    let values = input
        .split(',')
        .map(|v| v.trim().parse::<usize>().with_context(|| format!("bad integer {v:?}")))
        .collect::<Result<Vec<_>>>()?;
    if values.windows(2).any(|w| w[0] > w[1]) {
        bail!("list must be ascending: {input:?}");
    }
    Ok(values)
}
