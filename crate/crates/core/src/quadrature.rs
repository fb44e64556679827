//! Adaptive Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

const ORDER: usize = 16;
const MAX_PIECES: usize = 20_000;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = from_usize::<T>(n);
    let one = T::one();
    let two = lit::<T>(2.0);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nf + lit(0.5))).cos();
        let mut dp = T::zero();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, x);
            for k in 2..=n {
                let kf = from_usize::<T>(k);
                let p2 = ((two * kf - one) * x * p1 - (kf - one) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { one } else if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { one } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - one);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() {
                break;
            }
        }
        let w = two / ((one - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integral estimate with an absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub abs_err: T,
}

struct Rule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    fn apply<F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T) -> T {
        let half = (b - a) / lit(2.0);
        let mid = (a + b) / lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<T>()
            * half
    }

    fn split<F: FnMut(T) -> T>(&self, f: &mut F, lo: T, hi: T, whole: T) -> Piece<T> {
        let mid = (lo + hi) / lit(2.0);
        let left = self.apply(f, lo, mid);
        let right = self.apply(f, mid, hi);
        Piece { lo, hi, left, right, err: (left + right - whole).abs() }
    }
}

struct Piece<T> {
    lo: T,
    hi: T,
    left: T,
    right: T,
    err: T,
}

/// Integrates `f` over `[a, b]` by global adaptive bisection: the piece
/// with the largest error (16-point rule vs the sum over its halves) is
/// split until the summed error estimate drops below `abs_tol`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, abs_tol: T) -> Result<Integral<T>> {
    let (nodes, weights) = gauss_legendre(ORDER);
    let rule = Rule { nodes, weights };
    let whole = rule.apply(&mut f, a, b);
    let mut pieces = vec![rule.split(&mut f, a, b, whole)];
    for _ in 0..MAX_PIECES {
        let total_err: T = pieces.iter().map(|p| p.err).sum();
        let value: T = pieces.iter().map(|p| p.left + p.right).sum();
        if !value.is_finite() {
            return Err(Error::Overflow("integrate"));
        }
        if total_err <= abs_tol.max(T::epsilon() * value.abs()) {
            return Ok(Integral { value, abs_err: total_err });
        }
        let worst = (0..pieces.len())
            .max_by(|&i, &j| pieces[i].err.partial_cmp(&pieces[j].err).unwrap_or(std::cmp::Ordering::Equal))
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = (p.lo + p.hi) / lit(2.0);
        if mid <= p.lo || mid >= p.hi {
            return Err(Error::NoConvergence("integrate"));
        }
        pieces.push(rule.split(&mut f, p.lo, mid, p.left));
        pieces.push(rule.split(&mut f, mid, p.hi, p.right));
    }
    Err(Error::NoConvergence("integrate"))
}
