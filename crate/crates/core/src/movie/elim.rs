//! Gaussian elimination of isomorphism arrows in an F2 complex, tracking
//! the inclusion of the reduced complex and the projection onto it.

use std::collections::BTreeSet;

use crate::error::{KhError, Result};
use crate::khcomplex::ChainComplex;

type Vector = BTreeSet<usize>;

fn toggle(v: &mut Vector, x: usize) {
    if !v.remove(&x) {
        v.insert(x);
    }
}

fn xor_into(dst: &mut Vector, src: &Vector) {
    for &x in src {
        toggle(dst, x);
    }
}

pub(crate) struct Eliminator {
    d: Vec<Vector>,
    rev: Vec<Vector>,
    alive: Vec<bool>,
    /// image of each surviving generator under the inclusion
    incl: Vec<Vector>,
    /// original generators whose projection contains this generator
    proj_t: Vec<Vector>,
}

impl Eliminator {
    pub fn new(c: &ChainComplex) -> Self {
        let n = c.len();
        let sp = c.d_f2();
        let d: Vec<Vector> = (0..n).map(|k| sp.col(k).iter().copied().collect()).collect();
        let mut rev = vec![Vector::new(); n];
        for (x, col) in d.iter().enumerate() {
            for &y in col {
                rev[y].insert(x);
            }
        }
        Eliminator {
            d,
            rev,
            alive: vec![true; n],
            incl: (0..n).map(|x| Vector::from([x])).collect(),
            proj_t: (0..n).map(|x| Vector::from([x])).collect(),
        }
    }

    pub fn d(&self, x: usize) -> &Vector {
        &self.d[x]
    }

    pub fn is_alive(&self, x: usize) -> bool {
        self.alive[x]
    }

    /// Cancels the arrow `b -> c`, which must be present.
    pub fn cancel(&mut self, b: usize, c: usize) -> Result<()> {
        if !self.alive[b] || !self.alive[c] || !self.d[b].contains(&c) {
            return Err(KhError::ComplexMismatch(format!("cannot cancel {b} -> {c}")));
        }
        let db = self.d[b].clone();
        let sources: Vec<usize> = self.rev[c].iter().copied().filter(|&x| x != b).collect();
        let incl_b = self.incl[b].clone();
        for x in sources {
            for &y in &db {
                if self.d[x].contains(&y) {
                    self.d[x].remove(&y);
                    self.rev[y].remove(&x);
                } else {
                    self.d[x].insert(y);
                    self.rev[y].insert(x);
                }
            }
            xor_into(&mut self.incl[x], &incl_b);
        }
        let pc = self.proj_t[c].clone();
        for &z in &db {
            if z != c {
                xor_into(&mut self.proj_t[z], &pc);
            }
        }
        for dead in [b, c] {
            for y in std::mem::take(&mut self.d[dead]) {
                self.rev[y].remove(&dead);
            }
            for x in std::mem::take(&mut self.rev[dead]) {
                self.d[x].remove(&dead);
            }
            self.alive[dead] = false;
            self.incl[dead].clear();
            self.proj_t[dead].clear();
        }
        Ok(())
    }

    pub fn survivors(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&x| self.alive[x]).collect()
    }

    pub fn incl(&self, x: usize) -> &Vector {
        &self.incl[x]
    }

    pub fn proj_t(&self, x: usize) -> &Vector {
        &self.proj_t[x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::khcomplex::Ring;

    #[test]
    fn cancel_in_a_square() {
        // a -> {b, c}, b -> d, c -> d
        let c = ChainComplex::from_parts(
            Ring::F2,
            &[(0, 0), (1, 0), (1, 0), (2, 0)],
            vec![vec![(1, 1), (2, 1)], vec![(3, 1)], vec![(3, 1)], vec![]],
        )
        .unwrap();
        let mut e = Eliminator::new(&c);
        e.cancel(0, 1).unwrap();
        assert_eq!(e.survivors(), vec![2, 3]);
        // c -> d survives; projection sends b to c
        assert_eq!(e.d(2), &Vector::from([3]));
        assert!(e.proj_t(2).contains(&1));
        e.cancel(2, 3).unwrap();
        assert!(e.survivors().is_empty());
        assert!(e.cancel(0, 1).is_err());
    }
}
