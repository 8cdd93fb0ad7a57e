//! Parameter grids: `start:stop:step`, `start:stop:log[:per_decade]`,
//! comma lists and single values.

use anyhow::{bail, ensure, Context, Result};

const DEFAULT_PER_DECADE: usize = 10;

fn number(text: &str) -> Result<f64> {
    let x: f64 = text
        .trim()
        .parse()
        .with_context(|| format!("`{text}` is not a number"))?;
    ensure!(x.is_finite(), "`{text}` is not finite");
    Ok(x)
}

pub fn parse(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    ensure!(!text.is_empty(), "empty grid");
    if text.contains(',') {
        return text.split(',').map(number).collect();
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![number(single)?]),
        [start, stop, rest @ ..] if !rest.is_empty() && rest.len() <= 2 => {
            let (start, stop) = (number(start)?, number(stop)?);
            ensure!(stop >= start, "grid `{text}` runs backwards");
            if rest[0].trim() == "log" {
                let per_decade = match rest.get(1) {
                    Some(k) => k
                        .trim()
                        .parse()
                        .with_context(|| format!("bad points per decade in `{text}`"))?,
                    None => DEFAULT_PER_DECADE,
                };
                ensure!(per_decade > 0, "points per decade must be positive");
                ensure!(start > 0.0, "log grid `{text}` needs a positive start");
                Ok(log_spaced(start, stop, per_decade))
            } else {
                ensure!(rest.len() == 1, "malformed grid `{text}`");
                let step = number(rest[0])?;
                ensure!(step > 0.0, "grid step must be positive in `{text}`");
                let count = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize;
                ensure!(count < 10_000_000, "grid `{text}` is too long");
                Ok((0..=count).map(|i| start + i as f64 * step).collect())
            }
        }
        _ => bail!(
            "malformed grid `{text}`; expected start:stop:step, start:stop:log or a comma list"
        ),
    }
}

fn log_spaced(start: f64, stop: f64, per_decade: usize) -> Vec<f64> {
    if stop == start {
        return vec![start];
    }
    let decades = (stop / start).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=n)
        .map(|i| {
            if i == n {
                stop
            } else {
                start * 10f64.powf(decades * i as f64 / n as f64)
            }
        })
        .collect()
}

pub fn ascending(grid: &[f64], name: &str) -> Result<()> {
    ensure!(!grid.is_empty(), "{name} is empty");
    ensure!(
        grid.windows(2).all(|w| w[0] < w[1]),
        "{name} must be strictly ascending"
    );
    Ok(())
}

pub fn descending(grid: &[f64], name: &str) -> Result<()> {
    ensure!(!grid.is_empty(), "{name} is empty");
    ensure!(
        grid.windows(2).all(|w| w[0] > w[1]),
        "{name} must be strictly descending"
    );
    Ok(())
}

/// Rounds to integers and drops the repeats that log spacing produces at
/// small values. Step and list grids must already be integral.
pub fn integers(grid: &[f64], name: &str) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = Vec::with_capacity(grid.len());
    for &x in grid {
        ensure!((0.0..1.8e19).contains(&x), "{name} entry {x} is out of range");
        let n = x.round() as u64;
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    Ok(out)
}
