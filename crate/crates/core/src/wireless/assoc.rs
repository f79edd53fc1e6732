/// Chooses the AP a station at `position` should be associated with.
///
/// `aps` are AP positions along the same axis. The station keeps `current`
/// while it stays in range unless another AP is closer by at least
/// `hysteresis`; otherwise it picks the nearest AP in range (lowest index on
/// ties). Returns `None` when no AP is in range.
pub fn associate(position: f64, current: Option<usize>, aps: &[f64], range: f64, hysteresis: f64) -> Option<usize> {
    let dist = |i: usize| (aps[i] - position).abs();
    let nearest = (0..aps.len())
        .filter(|&i| dist(i) <= range)
        .min_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)))?;
    match current {
        Some(c) if c < aps.len() && dist(c) <= range => {
            if dist(c) - dist(nearest) >= hysteresis && nearest != c {
                Some(nearest)
            } else {
                Some(c)
            }
        }
        _ => Some(nearest),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const APS: [f64; 3] = [172.0 / 6.0, 172.0 / 2.0, 172.0 * 5.0 / 6.0];

    #[test]
    fn initial_pick_is_nearest() {
        assert_eq!(associate(0.0, None, &APS, 80.0, 5.0), Some(0));
        assert_eq!(associate(90.0, None, &APS, 80.0, 5.0), Some(1));
    }

    #[test]
    fn hysteresis_holds_near_midpoint() {
        let mid = (APS[0] + APS[1]) / 2.0;
        // just past the midpoint, but not by the margin
        assert_eq!(associate(mid + 2.0, Some(0), &APS, 80.0, 5.0), Some(0));
        // 2.5 m past the midpoint the difference in distance is 5 m
        assert_eq!(associate(mid + 2.5, Some(0), &APS, 80.0, 5.0), Some(1));
    }

    #[test]
    fn nobody_in_range() {
        assert_eq!(associate(500.0, Some(2), &APS, 80.0, 5.0), None);
    }

    #[test]
    fn leaving_range_forces_switch() {
        assert_eq!(associate(120.0, Some(0), &APS, 80.0, 50.0), Some(2));
    }
}
