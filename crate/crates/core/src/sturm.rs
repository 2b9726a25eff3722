//! Sturm sequences over Q: exact real-root counting, isolation and
//! bisection refinement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{rat, serde_rational, sign};
use crate::poly::Polynomial;

/// Sturm chain of a nonzero polynomial. Remainders are rescaled by positive
/// constants only, which leaves every sign count unchanged.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<Polynomial>,
}

fn rescale_positive(p: &Polynomial) -> Polynomial {
    let prim = p.primitive_rational();
    if prim.leading().is_positive() == p.leading().is_positive() {
        prim
    } else {
        -&prim
    }
}

impl SturmSequence {
    pub fn new(p: &Polynomial) -> Self {
        assert!(!p.is_zero(), "Sturm sequence of the zero polynomial");
        let mut chain = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(rescale_positive(&d));
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(rescale_positive(&-&r));
        }
        SturmSequence { chain }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.chain[0]
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Sign changes of the chain evaluated at `x`, zeros dropped.
    pub fn variations_at(&self, x: &BigRational) -> usize {
        count_variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    /// Sign changes of the chain as `x -> +inf`.
    pub fn variations_at_pos_inf(&self) -> usize {
        count_variations(self.chain.iter().map(|p| sign(&p.leading())))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }
}

fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// A root located either exactly or inside an open interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootInterval {
    Exact {
        #[serde(with = "serde_rational")]
        value: BigRational,
    },
    Open {
        #[serde(with = "serde_rational")]
        lo: BigRational,
        #[serde(with = "serde_rational")]
        hi: BigRational,
    },
}

impl RootInterval {
    pub fn lo(&self) -> &BigRational {
        match self {
            RootInterval::Exact { value } => value,
            RootInterval::Open { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &BigRational {
        match self {
            RootInterval::Exact { value } => value,
            RootInterval::Open { hi, .. } => hi,
        }
    }

    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }

    pub fn midpoint(&self) -> BigRational {
        (self.lo() + self.hi()) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        match self {
            RootInterval::Exact { value } => value == x,
            RootInterval::Open { lo, hi } => lo < x && x < hi,
        }
    }

    /// Closed-interval overlap test.
    pub fn overlaps(&self, other: &RootInterval) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }
}

/// Upper bound on the absolute value of every real root (Cauchy).
pub fn cauchy_bound(p: &Polynomial) -> BigRational {
    let lead = p.leading().abs();
    let n = p.degree().unwrap_or(0);
    let max = p.coeffs()[..n]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    BigRational::one() + max
}

/// Isolates every real root of the squarefree polynomial `p` lying in the
/// half-open interval `(lo, hi]`.
pub fn isolate_roots(p: &Polynomial, lo: &BigRational, hi: &BigRational) -> Vec<RootInterval> {
    let sturm = SturmSequence::new(p);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), sturm.count_in(lo, hi))];
    let two = BigRational::from_integer(BigInt::from(2));
    while let Some((a, b, n)) = stack.pop() {
        match n {
            0 => {}
            1 => {
                if p.eval(&b).is_zero() {
                    out.push(RootInterval::Exact { value: b });
                } else {
                    out.push(RootInterval::Open { lo: a, hi: b });
                }
            }
            _ => {
                let mid = (&a + &b) / &two;
                let left = sturm.count_in(&a, &mid);
                // right half first so the left half is popped first
                stack.push((mid.clone(), b, n - left));
                stack.push((a, mid, left));
            }
        }
    }
    out.sort_by(|x, y| x.lo().cmp(y.lo()));
    out
}

/// Bisects an isolating interval of `sturm`'s polynomial until its width is
/// at most `width`, keeping exactly one root inside.
pub fn refine(sturm: &SturmSequence, interval: RootInterval, width: &BigRational) -> RootInterval {
    let RootInterval::Open { mut lo, mut hi } = interval else {
        return interval;
    };
    let p = sturm.polynomial();
    let two = BigRational::from_integer(BigInt::from(2));
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        if p.eval(&mid).is_zero() {
            return RootInterval::Exact { value: mid };
        }
        if sturm.count_in(&lo, &mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RootInterval::Open { lo, hi }
}

/// Splits an isolating interval at `cut`. Returns the piece still holding
/// the root, or `None` when the root sits exactly at `cut`.
pub fn split_away(sturm: &SturmSequence, interval: RootInterval, cut: &BigRational) -> Option<RootInterval> {
    match interval {
        RootInterval::Exact { ref value } => (value != cut).then_some(interval),
        RootInterval::Open { lo, hi } => {
            if &hi == cut && sturm.polynomial().eval(cut).is_zero() {
                return None;
            }
            if !(&lo < cut && cut < &hi) {
                return Some(RootInterval::Open { lo, hi });
            }
            if sturm.polynomial().eval(cut).is_zero() {
                return None;
            }
            if sturm.count_in(&lo, cut) >= 1 {
                Some(RootInterval::Open { lo, hi: cut.clone() })
            } else {
                Some(RootInterval::Open { lo: cut.clone(), hi })
            }
        }
    }
}

/// Small positive rational below every positive root of `p` with `p(0) != 0`.
pub fn positive_root_lower_bound(p: &Polynomial) -> BigRational {
    // roots of x^n p(1/x) bound 1/x
    let rev: Vec<BigRational> = p.coeffs().iter().rev().cloned().collect();
    let bound = cauchy_bound(&Polynomial::new(rev));
    bound.recip() * rat(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn counts_roots_of_cubic() {
        // (x-1)(x-2)(x+3)
        let p = Polynomial::from_ints(&[6, -7, 0, 1]);
        let s = SturmSequence::new(&p);
        assert_eq!(s.count_in(&int(-10), &int(10)), 3);
        assert_eq!(s.count_in(&int(0), &int(3)), 2);
        // half-open: (1, 2] contains only 2
        assert_eq!(s.count_in(&int(1), &int(2)), 1);
        assert_eq!(s.count_in(&int(-3), &int(1)), 1);
    }

    #[test]
    fn isolates_and_refines_sqrt2() {
        let p = Polynomial::from_ints(&[-2, 0, 1]);
        let roots = isolate_roots(&p, &int(0), &int(4));
        assert_eq!(roots.len(), 1);
        let s = SturmSequence::new(&p);
        let r = refine(&s, roots[0].clone(), &crate::arith::two_pow_neg(40));
        assert!(r.width() <= crate::arith::two_pow_neg(40));
        let lo = r.lo();
        assert!(lo * lo < int(2));
        let hi = r.hi();
        assert!(hi * hi > int(2));
    }

    #[test]
    fn exact_rational_roots_are_reported() {
        let p = Polynomial::from_ints(&[-1, 2]); // root 1/2
        let roots = isolate_roots(&p, &int(-1), &int(1));
        assert_eq!(roots.len(), 1);
        let s = SturmSequence::new(&p);
        let r = refine(&s, roots[0].clone(), &crate::arith::two_pow_neg(10));
        assert_eq!(r, RootInterval::Exact { value: rat(1, 2) });
    }

    #[test]
    fn close_roots_separate() {
        // (1000x - 1)(1001x - 1)
        let p = Polynomial::from_ints(&[1, -2001, 1001000]);
        let roots = isolate_roots(&p, &int(0), &cauchy_bound(&p));
        assert_eq!(roots.len(), 2);
        assert!(roots[0].hi() <= roots[1].lo());
    }

    #[test]
    fn split_at_root() {
        let p = Polynomial::from_ints(&[-1, 3]); // root 1/3
        let s = SturmSequence::new(&p);
        let iv = RootInterval::Open { lo: int(0), hi: int(1) };
        assert!(split_away(&s, iv.clone(), &rat(1, 3)).is_none());
        assert_eq!(
            split_away(&s, iv, &rat(1, 2)),
            Some(RootInterval::Open { lo: int(0), hi: rat(1, 2) })
        );
    }
}
