//! Parsers for grid and list flags.

use gkp_qpc::QpcShape;

/// Parses a numeric grid.
///
/// Accepted forms: `0.4,0.5,0.6` (explicit list), `0.40:0.70:0.01` (inclusive
/// range with step) and `0:0.55#7` (seven evenly spaced points).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let bad = || format!("cannot parse grid {s:?}; use a,b,c or start:stop:step or start:stop#count");
    let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let values = if let Some((range, count)) = s.split_once('#') {
        let (a, b) = range.split_once(':').ok_or_else(bad)?;
        let (a, b) = (num(a).ok_or_else(bad)?, num(b).ok_or_else(bad)?);
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        match count {
            0 => return Err(bad()),
            1 => vec![a],
            _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
        }
    } else if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b, step) =
            (num(parts[0]).ok_or_else(bad)?, num(parts[1]).ok_or_else(bad)?, num(parts[2]).ok_or_else(bad)?);
        if step <= 0.0 || b < a {
            return Err(format!("range {s:?} needs start <= stop and a positive step"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        // multiply rather than accumulate so the points do not drift
        (0..count).map(|i| a + step * i as f64).collect()
    } else {
        s.split(',').map(|t| num(t).ok_or_else(bad)).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

pub fn parse_shapes(s: &str) -> Result<Vec<QpcShape>, String> {
    let shapes = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.parse::<QpcShape>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if shapes.is_empty() {
        return Err("no shapes given".into());
    }
    Ok(shapes)
}

pub fn parse_shape(s: &str) -> Result<QpcShape, String> {
    s.parse::<QpcShape>().map_err(|e| e.to_string())
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("cannot parse {t:?} as a positive integer")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() || v.contains(&0) {
        return Err("list must contain positive integers".into());
    }
    Ok(v)
}

/// `lo:hi` search interval.
pub fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("interval {s:?} is not lo:hi"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("interval {s:?} is not lo:hi"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("interval {s:?} is not lo:hi"))?;
    Ok((a, b))
}

/// Three comma-separated probabilities `p_correct,p_incorrect,p_discard`.
pub fn parse_probs(s: &str) -> Result<(f64, f64, f64), String> {
    let v = parse_grid(s)?;
    match v.as_slice() {
        [c, i, d] => Ok((*c, *i, *d)),
        _ => Err(format!("expected three probabilities, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.4, 0.5").unwrap(), vec![0.4, 0.5]);
        let r = parse_grid("0.40:0.70:0.01").unwrap();
        assert_eq!(r.len(), 31);
        assert!((r[30] - 0.70).abs() < 1e-12);
        let l = parse_grid("0:0.55#7").unwrap();
        assert_eq!(l.len(), 7);
        assert_eq!(l[0], 0.0);
        assert_eq!(l[6], 0.55);
        assert_eq!(parse_grid("0.3:0.3:0.1").unwrap(), vec![0.3]);
        for bad in ["", "a,b", "0:1", "1:0:0.1", "0:1:0", "0:1#0", "0:1:2:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn shapes_and_lists() {
        assert_eq!(parse_shapes("5x4,7x5").unwrap().len(), 2);
        assert!(parse_shapes("5x4,0x5").is_err());
        assert!(parse_shapes("").is_err());
        assert_eq!(parse_usize_list("3,5,7,9").unwrap(), vec![3, 5, 7, 9]);
        assert!(parse_usize_list("3,0").is_err());
        assert_eq!(parse_interval("0.45:0.7").unwrap(), (0.45, 0.7));
        assert_eq!(parse_probs("1,0,0").unwrap(), (1.0, 0.0, 0.0));
        assert!(parse_probs("1,0").is_err());
    }
}
