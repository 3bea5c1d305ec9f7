use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial in `y1..yn`.
///
/// Ordered by total degree first; among equal degrees the exponents of
/// `y2, y3, ..., yn` are compared lexicographically and `y1` is the least
/// significant variable. So `y1^d` is the smallest monomial of degree `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        Self(exps)
    }

    pub fn zero(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    /// The monomial `y_{var+1}` (0-based variable index).
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self(e)
    }

    pub fn pure_power(nvars: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = power;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, var: usize) -> u32 {
        self.0[var]
    }

    /// Total degree of the `y2..yn` part.
    pub fn tail_degree(&self) -> u32 {
        self.0.iter().skip(1).sum()
    }

    /// True for the pure powers `y1^d`, the kernel of the homological operator.
    pub fn is_pure_y1(&self) -> bool {
        self.tail_degree() == 0
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Divide by one power of `var`; `None` if it does not divide.
    pub fn div_var(&self, var: usize) -> Option<Self> {
        if self.0[var] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[var] -= 1;
        Some(Self(e))
    }

    pub fn mul_var(&self, var: usize) -> Self {
        let mut e = self.0.clone();
        e[var] += 1;
        Self(e)
    }

    /// All exponent vectors in `nvars` variables of total degree `degree`,
    /// in ascending monomial order.
    pub fn all_of_degree(nvars: usize, degree: u32) -> Vec<MultiIndex> {
        fn rec(prefix: &mut Vec<u32>, remaining: u32, left: usize, out: &mut Vec<MultiIndex>) {
            if left == 1 {
                prefix.push(remaining);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in 0..=remaining {
                prefix.push(e);
                rec(prefix, remaining - e, left - 1, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if degree == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(&mut Vec::with_capacity(nvars), degree, nvars, &mut out);
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.get(1..).cmp(&other.0.get(1..)))
            .then_with(|| self.0.first().cmp(&other.0.first()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    /// `y1^2 y3`, or `1` for the constant monomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "y{}", i + 1)?;
            } else {
                write!(f, "y{}^{}", i + 1, e)?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn y1_power_is_smallest_of_its_degree() {
        let all = MultiIndex::all_of_degree(3, 3);
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], m(&[3, 0, 0]));
        assert!(m(&[2, 1]) < m(&[1, 2]));
        assert!(m(&[0, 2]) < m(&[3, 0]));
    }

    #[test]
    fn display() {
        assert_eq!(m(&[2, 1, 0]).to_string(), "y1^2 y2");
        assert_eq!(m(&[0, 0]).to_string(), "1");
    }

    #[test]
    fn order_is_strict_total() {
        let all: Vec<_> = (0..5).flat_map(|d| MultiIndex::all_of_degree(3, d)).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                assert_eq!(a.cmp(b), i.cmp(&j));
            }
        }
    }
}
