//! Explicit site paths and their validation against the walk's rules.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::Landscape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Death,
    Wall,
}

/// Sites visited at times `0, 1, ..., m`, and how the walk ended.
///
/// A death end adds one more step (into the death state) after the last
/// site, so `tau = m + 1`; a wall end has the wall as last site and
/// `tau = m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub sites: Vec<u64>,
    pub end: Option<End>,
}

impl Trajectory {
    pub fn new(sites: Vec<u64>, end: End) -> Self {
        Self { sites, end: Some(end) }
    }

    /// Expands a list of turning points into unit steps.
    pub fn from_turning_points(points: &[u64], end: End) -> Self {
        let mut sites = Vec::new();
        if let Some(&first) = points.first() {
            sites.push(first);
        }
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b > a {
                sites.extend(a + 1..=b);
            } else {
                sites.extend((b..a).rev());
            }
        }
        Self::new(sites, end)
    }
}

fn is_trap(traps: &[BigUint], site: u64) -> bool {
    traps.binary_search(&BigUint::from(site)).is_ok()
}

/// Validates every step against the transition rules and returns `tau`.
pub fn replay(ls: &Landscape, traj: &Trajectory) -> Result<u64> {
    let illegal = |step: usize, reason: String| Error::IllegalTrajectory { step, reason };
    if traj.sites.is_empty() {
        return Err(illegal(0, "empty path".into()));
    }
    let end = traj
        .end
        .ok_or_else(|| illegal(traj.sites.len(), "path does not end in death or at the wall".into()))?;
    if traj.sites[0] != 0 {
        return Err(illegal(0, format!("walk must start at 0, got {}", traj.sites[0])));
    }
    let traps = ls.trap_positions();
    let wall = ls.wall();
    let last = traj.sites.len() - 1;
    for (t, w) in traj.sites.windows(2).enumerate() {
        let (x, y) = (w[0], w[1]);
        if wall.is_some_and(|wl| BigUint::from(x) >= *wl) {
            return Err(illegal(t, format!("site {x} is at or beyond the wall")));
        }
        if x.abs_diff(y) != 1 {
            return Err(illegal(t + 1, format!("jump from {x} to {y}")));
        }
        if x == 0 && y != 1 {
            return Err(illegal(t + 1, "the origin can only be left to the right".into()));
        }
    }
    match end {
        End::Death => {
            let x = traj.sites[last];
            if wall.is_some_and(|wl| BigUint::from(x) >= *wl) {
                return Err(illegal(last, format!("site {x} is at or beyond the wall")));
            }
            if !is_trap(&traps, x) {
                return Err(illegal(last + 1, format!("death at non-trap site {x}")));
            }
            Ok(last as u64 + 1)
        }
        End::Wall => {
            let wl = wall.ok_or(Error::WallRequired)?;
            if BigUint::from(traj.sites[last]) != *wl {
                return Err(illegal(last, "wall end must finish on the wall".into()));
            }
            Ok(last as u64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls() -> Landscape {
        Landscape::from_lengths(&[3, 4, 5], None).unwrap()
    }

    #[test]
    fn example_path() {
        let t = Trajectory::from_turning_points(&[0, 2, 1, 8, 4, 10, 3], End::Death);
        assert_eq!(t.sites.len(), 28);
        assert_eq!(replay(&ls(), &t).unwrap(), 28);
    }

    #[test]
    fn rejects_bad_paths() {
        let jump = Trajectory::new(vec![0, 1, 3], End::Death);
        assert!(matches!(
            replay(&ls(), &jump),
            Err(Error::IllegalTrajectory { step: 2, .. })
        ));
        let stay = Trajectory::new(vec![0, 1, 1], End::Death);
        assert!(replay(&ls(), &stay).is_err());
        let empty = Trajectory {
            sites: vec![],
            end: Some(End::Death),
        };
        assert!(replay(&ls(), &empty).is_err());
        let open = Trajectory {
            sites: vec![0],
            end: None,
        };
        assert!(replay(&ls(), &open).is_err());
        let free_death = Trajectory::new(vec![0, 1], End::Death);
        assert!(replay(&ls(), &free_death).is_err());
        let left_of_origin = Trajectory::new(vec![0, 1, 0, 1, 0], End::Death);
        assert_eq!(replay(&ls(), &left_of_origin).unwrap(), 5);
    }

    #[test]
    fn wall_end() {
        let walled = ls().with_wall(Some(BigUint::from(14u32))).unwrap();
        let t = Trajectory::from_turning_points(&[0, 14], End::Wall);
        assert_eq!(replay(&walled, &t).unwrap(), 14);
        let past = Trajectory::from_turning_points(&[0, 15], End::Wall);
        assert!(replay(&walled, &past).is_err());
        assert_eq!(replay(&ls(), &t).unwrap_err(), Error::WallRequired);
    }

    #[test]
    fn death_at_origin() {
        assert_eq!(replay(&ls(), &Trajectory::new(vec![0], End::Death)).unwrap(), 1);
    }
}
