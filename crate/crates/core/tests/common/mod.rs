//! Test-only reference solvers and random netlist generators.
#![allow(dead_code)]

use std::f64::consts::PI;

use impa_core::{Element, Netlist};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Input impedance by a direct nodal solve: build the node admittance
/// matrix from the element list, drive node 0 with 1 A and read `V0`.
/// `None` when the matrix is singular (no finite input impedance).
pub fn nodal_input_impedance(elements: &[Element], f: f64) -> Option<Complex64> {
    let jw = Complex64::new(0.0, 2.0 * PI * f);
    let nodes = 1 + elements
        .iter()
        .filter(|e| matches!(e, Element::SeriesCapacitor { .. }))
        .count();
    let mut y = vec![vec![Complex64::ZERO; nodes]; nodes];
    let mut k = 0;
    for e in elements {
        match *e {
            Element::PortTermination { .. } => {}
            Element::ShuntParallelLc { l, c } => y[k][k] += jw * c + 1.0 / (jw * l),
            Element::ShuntResistor { r } => y[k][k] += Complex64::new(1.0 / r, 0.0),
            Element::SeriesCapacitor { c } => {
                let yc = jw * c;
                y[k][k] += yc;
                y[k + 1][k + 1] += yc;
                y[k][k + 1] -= yc;
                y[k + 1][k] -= yc;
                k += 1;
            }
        }
    }
    let mut rhs = vec![Complex64::ZERO; nodes];
    rhs[0] = Complex64::ONE;
    let v = solve_dense(y, rhs)?;
    Some(v[0])
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[piv][col].norm() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *x -= factor * p;
            }
            let t = b[col];
            b[row] -= factor * t;
        }
    }
    let mut x = vec![Complex64::ZERO; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

pub fn gamma(z: Complex64, z0: f64) -> Complex64 {
    (z - z0) / (z + z0)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn random_reactive(rng: &mut ChaCha8Rng) -> Element {
    if rng.gen_bool(0.5) {
        Element::SeriesCapacitor {
            c: log_uniform(rng, 0.05e-12, 5e-12),
        }
    } else {
        Element::ShuntParallelLc {
            l: log_uniform(rng, 0.05e-9, 5e-9),
            c: log_uniform(rng, 0.1e-12, 10e-12),
        }
    }
}

/// Port plus 1..=6 capacitors and tanks in random order.
pub fn random_lossless_netlist(rng: &mut ChaCha8Rng) -> Netlist {
    let z0 = rng.gen_range(10.0..100.0);
    let count = rng.gen_range(1..=6);
    let mut elements = vec![Element::PortTermination { z0 }];
    elements.extend((0..count).map(|_| random_reactive(rng)));
    Netlist::new(elements).unwrap()
}

/// Random reactive ladder closed by one negative shunt resistor.
pub fn random_active_netlist(rng: &mut ChaCha8Rng) -> Netlist {
    let z0 = rng.gen_range(10.0..100.0);
    let count = rng.gen_range(1..=5);
    let mut elements = vec![Element::PortTermination { z0 }];
    elements.extend((0..count).map(|_| random_reactive(rng)));
    elements.push(Element::ShuntResistor {
        r: -log_uniform(rng, 5.0, 500.0),
    });
    Netlist::new(elements).unwrap()
}
