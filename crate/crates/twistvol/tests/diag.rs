//! Temporary diagnostic for the unit-comparison failures. Deleted before v1.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistvol::fixtures;
use twistvol::invariant::{build_fox_matrix, phi};
use twistvol::laurent::{compare_up_to_unit, LaurentPoly};
use twistvol::matrix::CMatrix;
use twistvol::rep::{lift_rep, SignAssignment, Sl2Rep};
use twistvol::scalar::Complex;
use twistvol::words::{AlphaMap, GroupRingElement, Presentation};

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::from_f64(re, im)
}

fn complex_in(rng: &mut ChaCha8Rng, r: f64) -> Complex<f64> {
    c(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn random_sl2(rng: &mut ChaCha8Rng) -> CMatrix<f64> {
    loop {
        let a = complex_in(rng, 1.0);
        if a.abs() < 0.5 {
            continue;
        }
        let b = complex_in(rng, 0.6);
        let cc = complex_in(rng, 0.6);
        let d = (Complex::one() + b * cc) / a;
        if d.abs() > 2.2 {
            continue;
        }
        return CMatrix::from_rows(vec![vec![a, b], vec![cc, d]]).unwrap();
    }
}

fn inverse2(m: &CMatrix<f64>) -> CMatrix<f64> {
    CMatrix::from_rows(vec![
        vec![m.get(1, 1), Complex::zero() - m.get(0, 1)],
        vec![Complex::zero() - m.get(1, 0), m.get(0, 0)],
    ])
    .unwrap()
}

fn example(name: &str) -> (Presentation, AlphaMap, Vec<CMatrix<f64>>) {
    let doc = fixtures::by_name(name).unwrap().primary().clone();
    let r = doc.resolve::<f64>().unwrap();
    let images = (0..r.rep.generator_count())
        .map(|g| r.rep.image(g).clone())
        .collect();
    (r.presentation, r.alpha, images)
}

fn conjugated(images: &[CMatrix<f64>], s: &CMatrix<f64>) -> Sl2Rep<f64> {
    let s_inv = inverse2(s);
    let conj = images
        .iter()
        .map(|m| s.mul(m).unwrap().mul(&s_inv).unwrap())
        .collect();
    Sl2Rep::new(conj).unwrap()
}

fn random_signs(rng: &mut ChaCha8Rng, components: usize) -> SignAssignment {
    let text: String = (0..components)
        .map(|_| if rng.gen_bool(0.5) { '+' } else { '-' })
        .collect();
    SignAssignment::parse(&text).unwrap()
}

fn describe(label: &str, p: &LaurentPoly<f64>) {
    println!(
        "  {label}: lo={} hi={} width={} max={:.3e}",
        p.lo(),
        p.hi(),
        p.width(),
        p.max_coeff_abs()
    );
}

#[test]
fn diag_deleted_column() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let knots = [example("figure8"), example("whitehead")];
    for case in 0..=97 {
        let (p, alpha, images) = &knots[rng.gen_range(0..knots.len())];
        let n = rng.gen_range(2..=5);
        let signs = random_signs(&mut rng, p.component_count);
        let rep = conjugated(images, &random_sl2(&mut rng));
        let lifted = lift_rep(n, p, &rep, &signs).unwrap();
        let fox = build_fox_matrix(p, alpha, &lifted);
        let mut pairs = Vec::new();
        for j in 0..p.generators.len() {
            let den = phi(&lifted, alpha, &GroupRingElement::generator_minus_one(j))
                .laurent_det()
                .unwrap();
            let num = fox
                .delete_block_column(n, j)
                .unwrap()
                .laurent_det()
                .unwrap();
            pairs.push((num, den));
        }
        let (n0, d0) = &pairs[0];
        for (nj, dj) in &pairs[1..] {
            let f = n0.mul(dj);
            let g = nj.mul(d0);
            if !compare_up_to_unit(&f, &g, 1e-8) {
                println!("case {case} n={n} knot_gens={}", p.generators.len());
                describe("f = num0*den1", &f);
                describe("g = num1*den0", &g);
                // Manual alignment: try shifts and signs, report best deviation.
                let scale = f.max_coeff_abs().max(g.max_coeff_abs());
                let mut best = f64::INFINITY;
                for shift in -4i64..=4 {
                    for sign in [1.0, -1.0] {
                        let moved = g.shift(shift).scale(c(sign, 0.0));
                        let dev = f.sub(&moved).max_coeff_abs();
                        if dev < best {
                            best = dev;
                        }
                    }
                }
                println!("  best aligned deviation = {:.3e} (rel {:.3e})", best, best / scale);
                let fc = f.clamp(1e-8 * f.max_coeff_abs());
                let gc = g.clamp(1e-8 * g.max_coeff_abs());
                describe("f clamped", &fc);
                describe("g clamped", &gc);
                return;
            }
        }
    }
    println!("no failure reproduced");
}
