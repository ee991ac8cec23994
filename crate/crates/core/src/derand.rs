//! Method of conditional expectations over seed prefixes.
//!
//! An [`Estimator`] maps a partial seed assignment to an exact rational that
//! averages over its extensions. The engine fixes bits (or `z`-bit blocks) one
//! step at a time, keeping the value on the right side of the unconditioned
//! value. Where values are computed, and at what round cost, is the caller's
//! business: a hook is invoked after every step for charging.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::hashfam::{FamilyParams, HashError, SeedAssignment};
use crate::num::fmt_ratio;
use crate::sim::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// True when `a` is strictly preferable to `b`.
    pub fn better(self, a: &BigRational, b: &BigRational) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }

    /// True when `child` does not regress from `parent`.
    pub fn no_worse(self, child: &BigRational, parent: &BigRational) -> bool {
        match self {
            Direction::Maximize => child >= parent,
            Direction::Minimize => child <= parent,
        }
    }
}

#[derive(Debug, Error)]
pub enum DerandError {
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("infeasible: estimator value {value} at step {step} violates threshold {threshold}")]
    Infeasible {
        step: usize,
        value: String,
        threshold: String,
    },
    #[error("block of {z} bits needs {} evaluators but only {n} nodes exist", 1u64 << .z)]
    BlockTooLarge { z: u32, n: usize },
    #[error("estimator regressed at step {step}: {parent} -> {child}")]
    Regressed {
        step: usize,
        parent: String,
        child: String,
    },
    #[error("{0}")]
    Estimator(String),
}

/// A pessimistic estimator over seed prefixes.
pub trait Estimator {
    fn direction(&self) -> Direction;

    /// Minimize: every tracked value must stay `< threshold`.
    /// Maximize: every tracked value must stay `≥ threshold`.
    fn threshold(&self) -> Option<BigRational> {
        None
    }

    fn value(&mut self, assignment: &SeedAssignment) -> Result<BigRational, DerandError>;

    /// Optional secondary key consulted only among candidates whose primary
    /// values tie; compared in the same direction.
    fn secondary(&mut self, _assignment: &SeedAssignment) -> Result<Option<BigRational>, DerandError> {
        Ok(None)
    }

    /// Values of all `2^z` block extensions, indexed by block value.
    fn block_values(
        &mut self,
        assignment: &SeedAssignment,
        z: u32,
    ) -> Result<Vec<BigRational>, DerandError> {
        (0..1u64 << z)
            .map(|c| self.value(&assignment.extend_block(c, z)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Bitwise,
    Blockwise { z: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub candidate_values: Vec<String>,
    pub chosen: u64,
}

#[derive(Debug, Clone)]
pub struct DerandRun {
    pub schedule: Schedule,
    pub seed: SeedAssignment,
    pub initial: BigRational,
    pub final_value: BigRational,
    pub trace: Vec<TraceEntry>,
}

impl DerandRun {
    pub fn seed_bits(&self) -> u128 {
        self.seed.seed().expect("run ends with a complete seed")
    }
}

fn check_threshold<E: Estimator + ?Sized>(
    est: &E,
    step: usize,
    value: &BigRational,
) -> Result<(), DerandError> {
    let Some(thr) = est.threshold() else {
        return Ok(());
    };
    let ok = match est.direction() {
        Direction::Minimize => value < &thr,
        Direction::Maximize => value >= &thr,
    };
    if ok {
        Ok(())
    } else {
        Err(DerandError::Infeasible {
            step,
            value: fmt_ratio(value),
            threshold: fmt_ratio(&thr),
        })
    }
}

/// Best candidate by primary value, then by the secondary key, then lowest
/// index.
fn pick_best<E: Estimator + ?Sized>(
    est: &mut E,
    parent: &SeedAssignment,
    z: u32,
    values: &[BigRational],
) -> Result<usize, DerandError> {
    let dir = est.direction();
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if dir.better(v, &values[best]) {
            best = i;
        }
    }
    let tied: Vec<usize> = (0..values.len()).filter(|&i| values[i] == values[best]).collect();
    if tied.len() < 2 {
        return Ok(best);
    }
    let mut chosen: Option<(usize, BigRational)> = None;
    for i in tied {
        let Some(key) = est.secondary(&parent.extend_block(i as u64, z))? else {
            return Ok(best);
        };
        if chosen.as_ref().is_none_or(|(_, k)| dir.better(&key, k)) {
            chosen = Some((i, key));
        }
    }
    Ok(chosen.map_or(best, |(i, _)| i))
}

/// One bitwise step; ties go to the secondary key, then to bit 0.
pub fn fix_next_bit<E: Estimator + ?Sized>(
    est: &mut E,
    assignment: &SeedAssignment,
) -> Result<(SeedAssignment, Vec<BigRational>, u64), DerandError> {
    assert!(!assignment.is_complete(), "fix_next_bit on a complete seed");
    let values = vec![
        est.value(&assignment.extend(false))?,
        est.value(&assignment.extend(true))?,
    ];
    let chosen = pick_best(est, assignment, 1, &values)?;
    Ok((assignment.extend(chosen == 1), values, chosen as u64))
}

/// One blockwise step with one evaluator per candidate; requires `2^z ≤ n`.
/// The final block may be shorter than `z`. Ties go to the secondary key,
/// then to the smallest block value.
pub fn fix_next_block<E: Estimator + ?Sized>(
    est: &mut E,
    assignment: &SeedAssignment,
    z: u32,
    n: usize,
) -> Result<(SeedAssignment, Vec<BigRational>, u64), DerandError> {
    assert!(!assignment.is_complete(), "fix_next_block on a complete seed");
    if z == 0 || z >= 63 || (1u64 << z) > n as u64 {
        return Err(DerandError::BlockTooLarge { z, n });
    }
    let z = z.min(assignment.free_bits());
    let values = est.block_values(assignment, z)?;
    debug_assert_eq!(values.len(), 1 << z);
    let chosen = pick_best(est, assignment, z, &values)?;
    Ok((assignment.extend_block(chosen as u64, z), values, chosen as u64))
}

/// Information handed to the per-step hook.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub step: usize,
    /// Bits fixed in this step.
    pub bits: u32,
    /// Candidates evaluated in this step.
    pub candidates: usize,
}

/// Fixes all `t` bits. `n` bounds the block size (one evaluator per
/// candidate). The hook runs after every step, typically to charge rounds.
pub fn run_to_completion<E: Estimator + ?Sized>(
    est: &mut E,
    params: &FamilyParams,
    schedule: Schedule,
    n: usize,
    mut hook: impl FnMut(StepInfo) -> Result<(), DerandError>,
) -> Result<DerandRun, DerandError> {
    let mut a = SeedAssignment::new(*params);
    let initial = est.value(&a)?;
    check_threshold(est, 0, &initial)?;
    let dir = est.direction();
    let mut current = initial.clone();
    let mut trace = Vec::new();
    let mut step = 0;
    while !a.is_complete() {
        let before = a.len();
        let (next, values, chosen) = match schedule {
            Schedule::Bitwise => fix_next_bit(est, &a)?,
            Schedule::Blockwise { z } => fix_next_block(est, &a, z, n)?,
        };
        let value = values[chosen as usize].clone();
        if !dir.no_worse(&value, &current) {
            return Err(DerandError::Regressed {
                step: step + 1,
                parent: fmt_ratio(&current),
                child: fmt_ratio(&value),
            });
        }
        check_threshold(est, step + 1, &value)?;
        trace.push(TraceEntry {
            step,
            candidate_values: values.iter().map(fmt_ratio).collect(),
            chosen,
        });
        hook(StepInfo {
            step,
            bits: next.len() - before,
            candidates: values.len(),
        })?;
        current = value;
        a = next;
        step += 1;
    }
    Ok(DerandRun {
        schedule,
        seed: a,
        initial,
        final_value: current,
        trace,
    })
}

/// Estimator given by a closure, handy for tests and simple callers.
pub struct FnEstimator<F> {
    pub direction: Direction,
    pub threshold: Option<BigRational>,
    pub f: F,
}

impl<F> Estimator for FnEstimator<F>
where
    F: FnMut(&SeedAssignment) -> Result<BigRational, DerandError>,
{
    fn direction(&self) -> Direction {
        self.direction
    }

    fn threshold(&self) -> Option<BigRational> {
        self.threshold.clone()
    }

    fn value(&mut self, assignment: &SeedAssignment) -> Result<BigRational, DerandError> {
        (self.f)(assignment)
    }
}

/// Checks `value(Y) = average of value over the 2^z block extensions`.
pub fn averaging_law_holds<E: Estimator + ?Sized>(
    est: &mut E,
    assignment: &SeedAssignment,
    z: u32,
) -> Result<bool, DerandError> {
    let parent = est.value(assignment)?;
    let z = z.min(assignment.free_bits());
    let kids = est.block_values(assignment, z)?;
    let sum = kids.iter().fold(BigRational::zero(), |acc, v| acc + v);
    Ok(sum / BigRational::from_integer((1u64 << z).into()) == parent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashfam::{conditional_count, Hasher, DEFAULT_T_MAX};
    use crate::num::{int, ratio};

    fn params() -> FamilyParams {
        FamilyParams::new(3, 3, 2).unwrap()
    }

    fn point_mass(target: u128) -> impl FnMut(&SeedAssignment) -> Result<BigRational, DerandError> {
        move |a| Ok(conditional_count(a, DEFAULT_T_MAX, |s| s == target)?.probability())
    }

    #[test]
    fn finds_point_mass_seed() {
        let mut est = FnEstimator {
            direction: Direction::Maximize,
            threshold: None,
            f: point_mass(0b101101),
        };
        let run = run_to_completion(&mut est, &params(), Schedule::Bitwise, 8, |_| Ok(())).unwrap();
        assert_eq!(run.seed_bits(), 0b101101);
        assert_eq!(run.final_value, int(1));
        assert_eq!(run.trace.len(), 6);
    }

    #[test]
    fn ties_choose_zero() {
        let mut est = FnEstimator {
            direction: Direction::Minimize,
            threshold: None,
            f: |_: &SeedAssignment| Ok(int(3)),
        };
        let run = run_to_completion(&mut est, &params(), Schedule::Bitwise, 8, |_| Ok(())).unwrap();
        assert_eq!(run.seed_bits(), 0);
        assert_eq!(run.final_value, run.initial);
        let run = run_to_completion(&mut est, &params(), Schedule::Blockwise { z: 2 }, 4, |_| Ok(()))
            .unwrap();
        assert_eq!(run.seed_bits(), 0);
    }

    #[test]
    fn block_argmin() {
        struct Fixed;
        impl Estimator for Fixed {
            fn direction(&self) -> Direction {
                Direction::Minimize
            }
            fn value(&mut self, _: &SeedAssignment) -> Result<BigRational, DerandError> {
                Ok(int(2))
            }
            fn block_values(&mut self, _: &SeedAssignment, _: u32) -> Result<Vec<BigRational>, DerandError> {
                Ok(vec![int(3), int(1), int(2), int(2)])
            }
        }
        let (a, _, chosen) = fix_next_block(&mut Fixed, &SeedAssignment::new(params()), 2, 4).unwrap();
        assert_eq!(chosen, 1);
        assert_eq!((a.prefix(), a.len()), (0b01, 2));
        assert!(matches!(
            fix_next_block(&mut Fixed, &SeedAssignment::new(params()), 3, 4),
            Err(DerandError::BlockTooLarge { z: 3, n: 4 })
        ));
    }

    #[test]
    fn z1_block_matches_bit() {
        let target = 0b011010;
        let mut a = FnEstimator {
            direction: Direction::Maximize,
            threshold: None,
            f: point_mass(target),
        };
        let mut b = FnEstimator {
            direction: Direction::Maximize,
            threshold: None,
            f: point_mass(target),
        };
        let r1 = run_to_completion(&mut a, &params(), Schedule::Bitwise, 2, |_| Ok(())).unwrap();
        let r2 = run_to_completion(&mut b, &params(), Schedule::Blockwise { z: 1 }, 2, |_| Ok(())).unwrap();
        assert_eq!(r1.seed_bits(), r2.seed_bits());
        assert_eq!(r1.trace, r2.trace);
    }

    #[test]
    fn infeasible_at_step_zero() {
        let mut est = FnEstimator {
            direction: Direction::Minimize,
            threshold: Some(int(1)),
            f: |_: &SeedAssignment| Ok(ratio(6, 5)),
        };
        let err = run_to_completion(&mut est, &params(), Schedule::Bitwise, 8, |_| Ok(())).unwrap_err();
        match err {
            DerandError::Infeasible { step, value, .. } => {
                assert_eq!(step, 0);
                assert_eq!(value, "6/5");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn maximize_coin_count() {
        let f = params();
        let h = Hasher::new(f);
        let nodes: Vec<u64> = (0..8).collect();
        let mut est = FnEstimator {
            direction: Direction::Maximize,
            threshold: None,
            f: |a: &SeedAssignment| {
                let mut total = BigRational::zero();
                for &x in &nodes {
                    total += conditional_count(a, DEFAULT_T_MAX, |s| h.coin(s, x, 1))?.probability();
                }
                Ok(total)
            },
        };
        let run = run_to_completion(&mut est, &f, Schedule::Bitwise, 8, |_| Ok(())).unwrap();
        let ones = nodes.iter().filter(|&&x| h.coin(run.seed_bits(), x, 1)).count();
        assert!(ones >= 4);
        assert_eq!(int(ones as i64), run.final_value);
    }

    #[test]
    fn secondary_key_breaks_ties_only() {
        struct Keyed;
        impl Estimator for Keyed {
            fn direction(&self) -> Direction {
                Direction::Maximize
            }
            fn value(&mut self, a: &SeedAssignment) -> Result<BigRational, DerandError> {
                // primary prefers bit 1 at step 1, indifferent elsewhere
                Ok(if a.len() >= 2 && a.prefix() >> 1 & 1 == 1 { int(2) } else if a.len() >= 2 { int(0) } else { int(1) })
            }
            fn secondary(&mut self, a: &SeedAssignment) -> Result<Option<BigRational>, DerandError> {
                // secondary prefers ones everywhere, including step 1's losing branch
                Ok(Some(int(a.prefix().count_ones() as i64) - int(3 * ((a.prefix() >> 1 & 1) == 0) as i64)))
            }
        }
        let run = run_to_completion(&mut Keyed, &params(), Schedule::Bitwise, 8, |_| Ok(())).unwrap();
        assert_eq!(run.seed_bits(), 0b111111);
    }

    #[test]
    fn trace_serializes() {
        let e = TraceEntry {
            step: 0,
            candidate_values: vec!["1/2".into(), "3".into()],
            chosen: 1,
        };
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"step":0,"candidate_values":["1/2","3"],"chosen":1}"#
        );
    }

    #[test]
    fn hook_sees_every_step() {
        let mut est = FnEstimator {
            direction: Direction::Maximize,
            threshold: None,
            f: |_: &SeedAssignment| Ok(int(0)),
        };
        let mut bits = 0;
        let mut calls = 0;
        run_to_completion(&mut est, &params(), Schedule::Blockwise { z: 2 }, 4, |s| {
            bits += s.bits;
            calls += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!((bits, calls), (6, 3));
    }
}
