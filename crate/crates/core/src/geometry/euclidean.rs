//! Flat space R^n with `φ_p(x) = p + x`.

use super::{check_len, Manifold, ManifoldPoint, TangentVector};
use crate::error::Result;
use crate::linalg::{add, dot, scale, sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Euclidean {
    n: usize,
}

impl Euclidean {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    fn check(&self, a: &[f64]) -> Result<()> {
        check_len(self.n, a.len())
    }
}

impl Manifold for Euclidean {
    fn retract_increment(&self, x: &TangentVector, dx: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.comps.len())?;
        check_len(self.n, dx.len())?;
        Ok(dx.to_vec())
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn constraint_violation(&self, _coords: &[f64]) -> f64 {
        0.0
    }

    fn project_point(&self, coords: &[f64]) -> Result<ManifoldPoint> {
        self.check(coords)?;
        Ok(ManifoldPoint::new(coords.to_vec()))
    }

    fn project(&self, p: &ManifoldPoint, ambient: &[f64]) -> Result<TangentVector> {
        self.check(ambient)?;
        Ok(TangentVector::new(p.clone(), ambient.to_vec()))
    }

    fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.check(&x.comps)?;
        self.check(&y.comps)?;
        Ok(dot(&x.comps, &y.comps))
    }

    fn retract(&self, x: &TangentVector) -> Result<ManifoldPoint> {
        self.check(&x.comps)?;
        self.check(x.base.coords())?;
        Ok(ManifoldPoint::new(add(x.base.coords(), &x.comps)))
    }

    fn inverse_retract(&self, p: &ManifoldPoint, u: &ManifoldPoint) -> Result<TangentVector> {
        self.check(p.coords())?;
        self.check(u.coords())?;
        Ok(TangentVector::new(p.clone(), sub(u.coords(), p.coords())))
    }

    fn tangent_map(&self, x: &TangentVector, v: &TangentVector) -> Result<TangentVector> {
        self.check(&v.comps)?;
        Ok(TangentVector::new(self.retract(x)?, v.comps.clone()))
    }

    fn tangent_map_transpose(
        &self,
        x: &TangentVector,
        a: &TangentVector,
    ) -> Result<TangentVector> {
        self.check(&a.comps)?;
        Ok(TangentVector::new(x.base.clone(), a.comps.clone()))
    }

    fn inverse_tangent_map(&self, p: &ManifoldPoint, w: &TangentVector) -> Result<TangentVector> {
        self.check(&w.comps)?;
        Ok(TangentVector::new(p.clone(), w.comps.clone()))
    }

    fn inverse_tangent_map_transpose(
        &self,
        _p: &ManifoldPoint,
        u: &ManifoldPoint,
        a: &TangentVector,
    ) -> Result<TangentVector> {
        self.check(&a.comps)?;
        Ok(TangentVector::new(u.clone(), a.comps.clone()))
    }

    fn orthonormal_basis(&self, p: &ManifoldPoint) -> Vec<TangentVector> {
        (0..self.n)
            .map(|i| {
                let mut e = vec![0.0; self.n];
                e[i] = 1.0;
                TangentVector::new(p.clone(), e)
            })
            .collect()
    }

    fn chordal_midpoint(&self, u: &ManifoldPoint, v: &ManifoldPoint) -> Result<ManifoldPoint> {
        self.check(u.coords())?;
        self.check(v.coords())?;
        if u == v {
            return Ok(u.clone());
        }
        Ok(ManifoldPoint::new(scale(0.5, &add(u.coords(), v.coords()))))
    }

    fn distance(&self, u: &ManifoldPoint, v: &ManifoldPoint) -> f64 {
        let d = sub(u.coords(), v.coords());
        dot(&d, &d).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retract_adds() {
        let e = Euclidean::new(2);
        let p = ManifoldPoint::new(vec![1.0, 2.0]);
        let u = e.retract(&TangentVector::new(p, vec![3.0, -1.0])).unwrap();
        assert_eq!(u.coords(), &[4.0, 1.0]);
    }

    #[test]
    fn basis_is_unit_vectors() {
        let e = Euclidean::new(3);
        let b = e.orthonormal_basis(&ManifoldPoint::new(vec![0.3, -2.0, 5.0]));
        assert_eq!(b[0].comps, vec![1.0, 0.0, 0.0]);
        assert_eq!(b[2].comps, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn tangent_map_is_identity_at_shifted_base() {
        let e = Euclidean::new(2);
        let p = ManifoldPoint::new(vec![1.0, 1.0]);
        let x = TangentVector::new(p.clone(), vec![0.5, 0.0]);
        let v = TangentVector::new(p, vec![2.0, 3.0]);
        let out = e.tangent_map(&x, &v).unwrap();
        assert_eq!(out.comps, vec![2.0, 3.0]);
        assert_eq!(out.base.coords(), &[1.5, 1.0]);
    }
}
