#![allow(dead_code)]

use drg_core::linalg::{cross, dot, norm};
use drg_core::{ManifoldPoint, TangentVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn sphere_point(rng: &mut ChaCha8Rng, blocks: usize) -> ManifoldPoint {
    ManifoldPoint::new((0..blocks).flat_map(|_| unit3(rng)).collect())
}

/// Random tangent vector at `p` with ambient norm at most `max_norm`.
pub fn tangent(rng: &mut ChaCha8Rng, p: &ManifoldPoint, max_norm: f64) -> TangentVector {
    let blocks = p.len() / 3;
    let mut out = Vec::with_capacity(p.len());
    for b in 0..blocks {
        let s = &p.coords()[3 * b..3 * b + 3];
        let r = unit3(rng);
        let t = cross(s, &r);
        let n = norm(&t);
        let len = rng.gen_range(0.0..1.0) * max_norm / (blocks as f64).sqrt();
        out.extend(t.iter().map(|x| x / n * len));
    }
    TangentVector::new(p.clone(), out)
}

/// A point at product geodesic distance at most `max_dist` from `u`.
pub fn nearby(rng: &mut ChaCha8Rng, u: &ManifoldPoint, max_dist: f64) -> ManifoldPoint {
    let t = tangent(rng, u, max_dist);
    let mut out = Vec::with_capacity(u.len());
    for b in 0..u.len() / 3 {
        let s = &u.coords()[3 * b..3 * b + 3];
        let x = &t.comps[3 * b..3 * b + 3];
        let th = norm(x);
        if th == 0.0 {
            out.extend_from_slice(s);
            continue;
        }
        for i in 0..3 {
            out.push(th.cos() * s[i] + th.sin() * x[i] / th);
        }
    }
    ManifoldPoint::new(out)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn block_norm_error(p: &ManifoldPoint) -> f64 {
    p.coords().chunks(3).map(|b| (dot(b, b).sqrt() - 1.0).abs()).fold(0.0, f64::max)
}
