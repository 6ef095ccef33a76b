//! The unit sphere S² and its products (S²)^d, with the projective retraction
//! `φ_p(x) = (p + x)/‖p + x‖` applied block by block.

use super::{check_len, Manifold, ManifoldPoint, TangentVector};
use crate::error::{Error, Result};
use crate::linalg::{cross, dot, norm};

/// `count` copies of the unit sphere in R³, stored as `3 * count` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spheres {
    count: usize,
}

/// Below this squared column norm a projector column is treated as zero when
/// building the tangent basis.
const BASIS_MIN_SQ: f64 = 1e-3;

impl Spheres {
    /// The single sphere S².
    pub fn single() -> Self {
        Self { count: 1 }
    }

    /// The product (S²)^count.
    pub fn product(count: usize) -> Self {
        assert!(count >= 1, "need at least one sphere");
        Self { count }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn blocks<'a>(&self, a: &'a [f64]) -> impl Iterator<Item = &'a [f64]> {
        a.chunks_exact(3)
    }

    fn check(&self, a: &[f64]) -> Result<()> {
        check_len(3 * self.count, a.len())
    }

    fn tangent(&self, base: &ManifoldPoint, comps: Vec<f64>) -> TangentVector {
        TangentVector::new(base.clone(), comps)
    }
}

fn normalized(a: &[f64]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// `(I - p pᵀ) y` on one block.
fn project_block(p: &[f64], y: &[f64], out: &mut [f64]) {
    let s = dot(p, y);
    for k in 0..3 {
        out[k] = y[k] - s * p[k];
    }
}

/// Orthonormal basis of `T_pS²`: Gram–Schmidt on the columns of the projector
/// `I - ppᵀ` in index order, skipping columns whose remainder is shorter than
/// `BASIS_MIN_SQ`, each vector signed so its first nonzero component is
/// positive.
///
/// Index order keeps the basis smooth in `p` away from `±e₁`; the Itoh–Abe
/// gradient and compositions built from it rely on that.
fn block_basis(p: &[f64]) -> [[f64; 3]; 2] {
    let mut basis: Vec<[f64; 3]> = Vec::with_capacity(2);
    for k in 0..3 {
        let mut col = [0.0; 3];
        col[k] = 1.0;
        let mut v = [0.0; 3];
        project_block(p, &col, &mut v);
        // two Gram–Schmidt passes against the accepted vectors and p
        for _ in 0..2 {
            for e in &basis {
                let s = dot(e, &v);
                for i in 0..3 {
                    v[i] -= s * e[i];
                }
            }
            let s = dot(p, &v);
            for i in 0..3 {
                v[i] -= s * p[i];
            }
        }
        if dot(&v, &v) < BASIS_MIN_SQ {
            continue;
        }
        let mut e = normalized(&v);
        if let Some(first) = e.iter().copied().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                e.iter_mut().for_each(|x| *x = -*x);
            }
        }
        basis.push(e);
        if basis.len() == 2 {
            break;
        }
    }
    [basis[0], basis[1]]
}

impl Manifold for Spheres {
    fn dim(&self) -> usize {
        2 * self.count
    }

    fn ambient_dim(&self) -> usize {
        3 * self.count
    }

    fn constraint_violation(&self, coords: &[f64]) -> f64 {
        self.blocks(coords)
            .map(|b| (norm(b) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn project_point(&self, coords: &[f64]) -> Result<ManifoldPoint> {
        self.check(coords)?;
        let mut out = Vec::with_capacity(coords.len());
        for (i, b) in self.blocks(coords).enumerate() {
            let n = norm(b);
            if n <= 1e-300 {
                return Err(Error::InvalidArgument(format!(
                    "block {i} is zero and cannot be normalised"
                )));
            }
            out.extend(b.iter().map(|x| x / n));
        }
        Ok(ManifoldPoint::new(out))
    }

    fn project(&self, p: &ManifoldPoint, ambient: &[f64]) -> Result<TangentVector> {
        self.check(p.coords())?;
        self.check(ambient)?;
        let mut out = vec![0.0; ambient.len()];
        for ((pb, yb), ob) in self
            .blocks(p.coords())
            .zip(self.blocks(ambient))
            .zip(out.chunks_exact_mut(3))
        {
            project_block(pb, yb, ob);
        }
        Ok(self.tangent(p, out))
    }

    fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.check(&x.comps)?;
        self.check(&y.comps)?;
        Ok(dot(&x.comps, &y.comps))
    }

    fn retract(&self, x: &TangentVector) -> Result<ManifoldPoint> {
        self.check(x.base.coords())?;
        self.check(&x.comps)?;
        let mut out = Vec::with_capacity(x.comps.len());
        for (pb, xb) in self.blocks(x.base.coords()).zip(self.blocks(&x.comps)) {
            if xb.iter().all(|&c| c == 0.0) {
                out.extend_from_slice(pb);
                continue;
            }
            let q = [pb[0] + xb[0], pb[1] + xb[1], pb[2] + xb[2]];
            let mut r = normalized(&q);
            // second normalisation keeps the unit-norm invariant at round-off
            // level over very long runs
            let n = norm(&r);
            r.iter_mut().for_each(|v| *v /= n);
            out.extend_from_slice(&r);
        }
        Ok(ManifoldPoint::new(out))
    }

    fn retract_increment(&self, x: &TangentVector, dx: &[f64]) -> Result<Vec<f64>> {
        self.check(x.base.coords())?;
        self.check(&x.comps)?;
        self.check(dx)?;
        let mut out = Vec::with_capacity(dx.len());
        for ((pb, xb), db) in self
            .blocks(x.base.coords())
            .zip(self.blocks(&x.comps))
            .zip(self.blocks(dx))
        {
            if db.iter().all(|&d| d == 0.0) {
                out.extend_from_slice(&[0.0; 3]);
                continue;
            }
            // q/|q| - r/|r| with q = r + dx, using
            // |q|² - |r|² = dx·(2r + dx)
            let r = [pb[0] + xb[0], pb[1] + xb[1], pb[2] + xb[2]];
            let q = [r[0] + db[0], r[1] + db[1], r[2] + db[2]];
            let (nr, nq) = (norm(&r), norm(&q));
            let dn2 = db[0] * (2.0 * r[0] + db[0])
                + db[1] * (2.0 * r[1] + db[1])
                + db[2] * (2.0 * r[2] + db[2]);
            let k = dn2 / (nr * nq * (nr + nq));
            for i in 0..3 {
                out.push(db[i] / nq - r[i] * k);
            }
        }
        Ok(out)
    }

    fn inverse_retract(&self, p: &ManifoldPoint, u: &ManifoldPoint) -> Result<TangentVector> {
        self.check(p.coords())?;
        self.check(u.coords())?;
        if p == u {
            return Ok(TangentVector::zero(p));
        }
        let mut out = Vec::with_capacity(u.len());
        for (block, (pb, ub)) in self.blocks(p.coords()).zip(self.blocks(u.coords())).enumerate() {
            let d = dot(pb, ub);
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Domain { block, dot: d });
            }
            for k in 0..3 {
                out.push(ub[k] / d - pb[k]);
            }
        }
        Ok(self.tangent(p, out))
    }

    fn tangent_map(&self, x: &TangentVector, v: &TangentVector) -> Result<TangentVector> {
        self.check(&x.comps)?;
        self.check(&v.comps)?;
        let mut base = Vec::with_capacity(x.comps.len());
        let mut out = Vec::with_capacity(x.comps.len());
        for ((pb, xb), vb) in self
            .blocks(x.base.coords())
            .zip(self.blocks(&x.comps))
            .zip(self.blocks(&v.comps))
        {
            let q = [pb[0] + xb[0], pb[1] + xb[1], pb[2] + xb[2]];
            let n2 = dot(&q, &q);
            let n = n2.sqrt();
            let s = dot(&q, vb) / n2;
            for k in 0..3 {
                out.push((vb[k] - s * q[k]) / n);
                base.push(q[k] / n);
            }
        }
        Ok(TangentVector::new(ManifoldPoint::new(base), out))
    }

    fn tangent_map_transpose(
        &self,
        x: &TangentVector,
        a: &TangentVector,
    ) -> Result<TangentVector> {
        self.check(&x.comps)?;
        self.check(&a.comps)?;
        let mut out = vec![0.0; a.comps.len()];
        for (((pb, xb), ab), ob) in self
            .blocks(x.base.coords())
            .zip(self.blocks(&x.comps))
            .zip(self.blocks(&a.comps))
            .zip(out.chunks_exact_mut(3))
        {
            // T_xφ_p is the symmetric matrix (I - q qᵀ/|q|²)/|q|; its metric
            // transpose onto T_pM adds the projection onto p's tangent plane.
            let q = [pb[0] + xb[0], pb[1] + xb[1], pb[2] + xb[2]];
            let n2 = dot(&q, &q);
            let n = n2.sqrt();
            let s = dot(&q, ab) / n2;
            let y = [
                (ab[0] - s * q[0]) / n,
                (ab[1] - s * q[1]) / n,
                (ab[2] - s * q[2]) / n,
            ];
            project_block(pb, &y, ob);
        }
        Ok(self.tangent(&x.base, out))
    }

    fn inverse_tangent_map(&self, p: &ManifoldPoint, w: &TangentVector) -> Result<TangentVector> {
        self.check(p.coords())?;
        self.check(&w.comps)?;
        let mut out = Vec::with_capacity(w.comps.len());
        for (block, ((pb, ub), wb)) in self
            .blocks(p.coords())
            .zip(self.blocks(w.base.coords()))
            .zip(self.blocks(&w.comps))
            .enumerate()
        {
            let d = dot(pb, ub);
            if d <= 0.0 {
                return Err(Error::Domain { block, dot: d });
            }
            let s = dot(pb, wb) / d;
            for k in 0..3 {
                out.push((wb[k] - s * ub[k]) / d);
            }
        }
        Ok(self.tangent(p, out))
    }

    fn inverse_tangent_map_transpose(
        &self,
        p: &ManifoldPoint,
        u: &ManifoldPoint,
        a: &TangentVector,
    ) -> Result<TangentVector> {
        self.check(p.coords())?;
        self.check(u.coords())?;
        self.check(&a.comps)?;
        let mut out = vec![0.0; a.comps.len()];
        for (block, (((pb, ub), ab), ob)) in self
            .blocks(p.coords())
            .zip(self.blocks(u.coords()))
            .zip(self.blocks(&a.comps))
            .zip(out.chunks_exact_mut(3))
            .enumerate()
        {
            let d = dot(pb, ub);
            if d <= 0.0 {
                return Err(Error::Domain { block, dot: d });
            }
            let s = dot(ub, ab) / d;
            let y = [
                (ab[0] - s * pb[0]) / d,
                (ab[1] - s * pb[1]) / d,
                (ab[2] - s * pb[2]) / d,
            ];
            project_block(ub, &y, ob);
        }
        Ok(self.tangent(u, out))
    }

    fn orthonormal_basis(&self, p: &ManifoldPoint) -> Vec<TangentVector> {
        let n = p.len();
        let mut out = Vec::with_capacity(2 * self.count);
        for (i, pb) in self.blocks(p.coords()).enumerate() {
            for e in block_basis(pb) {
                let mut comps = vec![0.0; n];
                comps[3 * i..3 * i + 3].copy_from_slice(&e);
                out.push(self.tangent(p, comps));
            }
        }
        out
    }

    fn chordal_midpoint(&self, u: &ManifoldPoint, v: &ManifoldPoint) -> Result<ManifoldPoint> {
        self.check(u.coords())?;
        self.check(v.coords())?;
        if u == v {
            return Ok(u.clone());
        }
        let mut out = Vec::with_capacity(u.len());
        for (block, (ub, vb)) in self.blocks(u.coords()).zip(self.blocks(v.coords())).enumerate() {
            let s = [ub[0] + vb[0], ub[1] + vb[1], ub[2] + vb[2]];
            let n = norm(&s);
            if n <= 1e-12 {
                return Err(Error::Antipodal { block, norm: n });
            }
            out.extend(s.iter().map(|x| x / n));
        }
        Ok(ManifoldPoint::new(out))
    }

    /// Great-circle distance per block, combined in ℓ². Evaluated as
    /// `atan2(|u×v|, u·v)`, which equals `arccos(u·v)` on the sphere but keeps
    /// full relative accuracy for nearby points.
    fn distance(&self, u: &ManifoldPoint, v: &ManifoldPoint) -> f64 {
        self.blocks(u.coords())
            .zip(self.blocks(v.coords()))
            .map(|(ub, vb)| {
                let angle = norm(&cross(ub, vb)).atan2(dot(ub, vb));
                angle * angle
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn pt(c: &[f64]) -> ManifoldPoint {
        ManifoldPoint::new(c.to_vec())
    }

    #[test]
    fn retract_examples() {
        let s = Spheres::single();
        let p = pt(&[1.0, 0.0, 0.0]);
        assert_eq!(s.retract(&TangentVector::zero(&p)).unwrap(), p);
        let u = s
            .retract(&TangentVector::new(p.clone(), vec![0.0, 1.0, 0.0]))
            .unwrap();
        assert!((u.coords()[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((u.coords()[1] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(u.coords()[2], 0.0);
    }

    #[test]
    fn inverse_retract_examples() {
        let s = Spheres::single();
        let p = pt(&[1.0, 0.0, 0.0]);
        let x = s
            .inverse_retract(&p, &pt(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]))
            .unwrap();
        assert!((x.comps[0]).abs() < 1e-15);
        assert!((x.comps[1] - 1.0).abs() < 1e-15);
        assert!(matches!(
            s.inverse_retract(&p, &pt(&[0.0, 1.0, 0.0])),
            Err(Error::Domain { block: 0, .. })
        ));
        assert_eq!(s.inverse_retract(&p, &p).unwrap().comps, vec![0.0; 3]);
    }

    #[test]
    fn tangent_map_example() {
        let s = Spheres::single();
        let p = pt(&[1.0, 0.0, 0.0]);
        let x = TangentVector::new(p.clone(), vec![0.0, 1.0, 0.0]);
        let v = TangentVector::new(p, vec![0.0, 0.0, 1.0]);
        let out = s.tangent_map(&x, &v).unwrap();
        assert!((out.comps[2] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(&out.comps[..2], &[0.0, 0.0]);
        assert!((out.base.coords()[0] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn basis_at_north_pole_spans_xy_plane() {
        let s = Spheres::single();
        let p = pt(&[0.0, 0.0, 1.0]);
        let b = s.orthonormal_basis(&p);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].comps, vec![1.0, 0.0, 0.0]);
        assert_eq!(b[1].comps, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn basis_handles_axis_points() {
        let s = Spheres::single();
        for p in [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]] {
            let b = s.orthonormal_basis(&pt(&p));
            for e in &b {
                assert!(dot(&e.comps, &p).abs() < 1e-15);
                assert!((norm(&e.comps) - 1.0).abs() < 1e-15);
            }
            assert!(dot(&b[0].comps, &b[1].comps).abs() < 1e-15);
        }
    }

    #[test]
    fn chordal_midpoint_examples() {
        let s = Spheres::single();
        let c = s
            .chordal_midpoint(&pt(&[1.0, 0.0, 0.0]), &pt(&[0.0, 1.0, 0.0]))
            .unwrap();
        assert!((c.coords()[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(
            s.chordal_midpoint(&pt(&[1.0, 0.0, 0.0]), &pt(&[-1.0, 0.0, 0.0])),
            Err(Error::Antipodal { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let s = Spheres::single();
        let u = pt(&[1.0, 0.0, 0.0]);
        assert_eq!(s.distance(&u, &u), 0.0);
        assert!((s.distance(&u, &pt(&[0.0, 1.0, 0.0])) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = Spheres::product(2);
        let p = pt(&[0.0, 0.0, 1.0]);
        assert_eq!(
            s.retract(&TangentVector::zero(&p)),
            Err(Error::DimensionMismatch { expected: 6, found: 3 })
        );
    }
}
