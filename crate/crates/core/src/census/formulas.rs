//! Closed-form sizes of the converted toy game, per decision level of P1.
//!
//! `x_l` counts basic coordinator nodes at level `l`. `y_l(c)` counts pruned
//! coordinator nodes whose public state still holds `c` possible private
//! states; a node with `i` states and `A` actions has `n(c, i)` prescriptions
//! leaving `c` states. The folded game merges the `c` histories of a pruned
//! node, which then has `A^c` prescriptions each followed by a chance node.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::CensusError;

fn check(c: usize, a: usize, h: usize) -> Result<(), CensusError> {
    if c < 1 || a < 2 || h < 1 {
        return Err(CensusError::InvalidParameters(format!("need C >= 1, A >= 2, H >= 1; got C={c} A={a} H={h}")));
    }
    Ok(())
}

fn pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

/// Reduced plans of P1: one action sequence of length H per private state.
pub fn count_normal_plans(c: usize, a: usize, h: usize) -> Result<BigUint, CensusError> {
    check(c, a, h)?;
    Ok(pow(a, c * h))
}

pub fn count_basic(c: usize, a: usize, h: usize, both_private: bool) -> Result<BigUint, CensusError> {
    check(c, a, h)?;
    let mut level = BigUint::from(if both_private { c * c } else { c });
    let step = pow(a, c);
    let mut total = BigUint::zero();
    for _ in 0..h {
        total += &level;
        level *= &step;
    }
    Ok(total)
}

/// Prescriptions that keep `i` of `big_i` states alive: the played action is
/// one of `a`, the `big_i - i` dropped states get one of the other `a - 1`
/// actions, and the state of the actual history always survives.
pub fn exclusion_children(a: usize, i: usize, big_i: usize) -> BigUint {
    if i == 0 || i > big_i {
        return BigUint::zero();
    }
    BigUint::from(a) * pow(a - 1, big_i - i) * binomial(big_i - 1, big_i - i)
}

/// `levels[l][c]` = number of pruned coordinator nodes at level `l` holding
/// `c` private states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelProfile {
    pub levels: Vec<Vec<BigUint>>,
}

pub fn level_profile(c: usize, a: usize, h: usize, both_private: bool) -> Result<LevelProfile, CensusError> {
    check(c, a, h)?;
    let mut first = vec![BigUint::zero(); c + 1];
    first[c] = BigUint::from(if both_private { c * c } else { c });
    let mut levels = vec![first];
    for _ in 1..h {
        let prev = levels.last().expect("seeded");
        let mut next = vec![BigUint::zero(); c + 1];
        for (k, slot) in next.iter_mut().enumerate().skip(1) {
            for (i, count) in prev.iter().enumerate().skip(k) {
                if !count.is_zero() {
                    *slot += count * exclusion_children(a, k, i);
                }
            }
        }
        levels.push(next);
    }
    Ok(LevelProfile { levels })
}

pub fn count_pruned(c: usize, a: usize, h: usize, both_private: bool) -> Result<BigUint, CensusError> {
    let p = level_profile(c, a, h, both_private)?;
    Ok(p.levels.iter().flatten().sum())
}

/// Folded coordinator nodes plus their prescription chance nodes. Identical
/// whether or not P2 also holds a private state, since that state is folded.
pub fn count_folded(c: usize, a: usize, h: usize) -> Result<BigUint, CensusError> {
    let p = level_profile(c, a, h, false)?;
    let mut total = BigUint::zero();
    for level in &p.levels {
        for (k, count) in level.iter().enumerate().skip(1) {
            if count.is_zero() {
                continue;
            }
            let kb = BigUint::from(k);
            if !(count % &kb).is_zero() {
                return Err(CensusError::NonDivisibleLevelProfile { c: k, count: count.to_string() });
            }
            total += count / &kb * (pow(a, k) + BigUint::one());
        }
    }
    Ok(total)
}

/// Scientific notation with `sig` significant digits, as printf's `%.*E`
/// renders an exact integer (ties go to the even digit):
/// `format_sci(4398046511104, 3) == "4.40E+12"`, `format_sci(5265, 3) == "5.26E+03"`.
pub fn format_sci(x: &BigUint, sig: usize) -> String {
    let sig = sig.max(1);
    let digits: Vec<u8> = x.to_string().bytes().map(|b| b - b'0').collect();
    let mut exp = digits.len() - 1;
    let mut head: Vec<u8> = digits.iter().copied().chain(core::iter::repeat(0)).take(sig).collect();
    let round_up = digits.len() > sig && {
        let rest_nonzero = digits[sig + 1..].iter().any(|&d| d != 0);
        digits[sig] > 5 || (digits[sig] == 5 && (rest_nonzero || head[sig - 1] % 2 == 1))
    };
    if round_up {
        let mut k = sig;
        loop {
            if k == 0 {
                head.insert(0, 1);
                head.truncate(sig);
                exp += 1;
                break;
            }
            k -= 1;
            if head[k] == 9 {
                head[k] = 0;
            } else {
                head[k] += 1;
                break;
            }
        }
    }
    let mut s = String::new();
    s.push((b'0' + head[0]) as char);
    if sig > 1 {
        s.push('.');
        for d in &head[1..] {
            s.push((b'0' + d) as char);
        }
    }
    s.push_str(&format!("E+{exp:02}"));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn small_cases() {
        assert_eq!(count_normal_plans(3, 2, 2).unwrap(), n(64));
        assert_eq!(count_normal_plans(1, 2, 1).unwrap(), n(2));
        assert_eq!(count_basic(3, 2, 2, false).unwrap(), n(27));
        assert_eq!(count_basic(3, 2, 2, true).unwrap(), n(81));
        assert_eq!(count_pruned(3, 2, 3, false).unwrap(), n(135));
        assert_eq!(count_folded(3, 2, 1).unwrap(), n(9));
        assert_eq!(count_folded(3, 2, 2).unwrap(), n(75));
    }

    #[test]
    fn one_action_is_rejected() {
        assert!(count_pruned(3, 1, 2, false).is_err());
        assert!(count_basic(0, 2, 2, false).is_err());
    }

    #[test]
    fn sci_rounding() {
        assert_eq!(format_sci(&n(8), 3), "8.00E+00");
        assert_eq!(format_sci(&n(135), 3), "1.35E+02");
        assert_eq!(format_sci(&n(4_398_046_511_104), 3), "4.40E+12");
        assert_eq!(format_sci(&n(99_960), 3), "1.00E+05");
        assert_eq!(format_sci(&n(1_234_500), 3), "1.23E+06");
        assert_eq!(format_sci(&n(1_235_000), 3), "1.24E+06");
        assert_eq!(format_sci(&n(5_265), 3), "5.26E+03");
        assert_eq!(format_sci(&n(5_265_001), 3), "5.27E+06");
    }

    const P1_ONLY: [[&str; 4]; 14] = [
        ["8.00E+00", "3.00E+00", "3.00E+00", "9.00E+00"],
        ["6.40E+01", "2.70E+01", "2.70E+01", "7.50E+01"],
        ["5.12E+02", "2.19E+02", "1.35E+02", "3.75E+02"],
        ["4.10E+03", "1.76E+03", "5.19E+02", "1.46E+03"],
        ["3.28E+04", "1.40E+04", "1.72E+03", "4.86E+03"],
        ["2.62E+05", "1.12E+05", "5.18E+03", "1.48E+04"],
        ["2.10E+06", "8.99E+05", "1.46E+04", "4.18E+04"],
        ["1.68E+07", "7.19E+06", "3.92E+04", "1.13E+05"],
        ["1.34E+08", "5.75E+07", "1.01E+05", "2.93E+05"],
        ["1.07E+09", "4.60E+08", "2.55E+05", "7.40E+05"],
        ["8.59E+09", "3.68E+09", "6.27E+05", "1.82E+06"],
        ["6.87E+10", "2.95E+10", "1.51E+06", "4.41E+06"],
        ["5.50E+11", "2.36E+11", "3.59E+06", "1.05E+07"],
        ["4.40E+12", "1.88E+12", "8.40E+06", "2.46E+07"],
    ];

    const BOTH_PRIVATE: [[&str; 4]; 14] = [
        ["8.00E+00", "9.00E+00", "9.00E+00", "9.00E+00"],
        ["6.40E+01", "8.10E+01", "8.10E+01", "7.50E+01"],
        ["5.12E+02", "6.57E+02", "4.05E+02", "3.75E+02"],
        ["4.10E+03", "5.26E+03", "1.56E+03", "1.46E+03"],
        ["3.28E+04", "4.21E+04", "5.16E+03", "4.86E+03"],
        ["2.62E+05", "3.37E+05", "1.55E+04", "1.48E+04"],
        ["2.10E+06", "2.70E+06", "4.37E+04", "4.18E+04"],
        ["1.68E+07", "2.16E+07", "1.17E+05", "1.13E+05"],
        ["1.34E+08", "1.73E+08", "3.04E+05", "2.93E+05"],
        ["1.07E+09", "1.38E+09", "7.65E+05", "7.40E+05"],
        ["8.59E+09", "1.10E+10", "1.88E+06", "1.82E+06"],
        ["6.87E+10", "8.84E+10", "4.53E+06", "4.41E+06"],
        ["5.50E+11", "7.07E+11", "1.08E+07", "1.05E+07"],
        ["4.40E+12", "5.65E+12", "2.52E+07", "2.46E+07"],
    ];

    fn row(h: usize, both: bool) -> [String; 4] {
        [
            format_sci(&count_normal_plans(3, 2, h).unwrap(), 3),
            format_sci(&count_basic(3, 2, h, both).unwrap(), 3),
            format_sci(&count_pruned(3, 2, h, both).unwrap(), 3),
            format_sci(&count_folded(3, 2, h).unwrap(), 3),
        ]
    }

    #[test]
    fn published_tables_for_three_states_two_actions() {
        for h in 1..=14 {
            assert_eq!(row(h, false), P1_ONLY[h - 1].map(String::from), "P1 only, H={h}");
            assert_eq!(row(h, true), BOTH_PRIVATE[h - 1].map(String::from), "both, H={h}");
        }
    }

    proptest::proptest! {
        #[test]
        fn exclusion_children_partition_all_prescriptions(a in 2usize..=5, big_i in 1usize..=12) {
            let sum: BigUint = (1..=big_i).map(|i| exclusion_children(a, i, big_i)).sum();
            proptest::prop_assert_eq!(sum, pow(a, big_i));
        }

        #[test]
        fn pruning_never_grows_the_tree(c in 1usize..=5, a in 2usize..=4, h in 1usize..=6, both in proptest::bool::ANY) {
            proptest::prop_assert!(count_pruned(c, a, h, both).unwrap() <= count_basic(c, a, h, both).unwrap());
        }
    }
}
