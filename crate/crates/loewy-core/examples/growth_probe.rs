//! Prints the Nevanlinna growth data of a tanh-of-exponential solution:
//! the pole count explodes like sqrt(t) e^t, so T(r) is dominated by N(r)
//! and the level-2 fit exponent lands near 1.
//!
//! Run with `cargo run --example growth_probe --release`.

use loewy_core::expr::{exp as eexp, tanh, zvar};
use loewy_core::growth::{counting_n, hayman_check, pole_count, proximity_m, PoleSource, TargetSet};
use loewy_core::scalar::Complex64;

fn main() {
    let f = tanh(eexp(zvar()));
    // poles where cosh(e^z) = 0, i.e. e^z = i pi (m + 1/2)
    let source = PoleSource::ExpTargets {
        k: Complex64::new(1.0, 0.0),
        z0: Complex64::new(0.0, 0.0),
        targets: TargetSet::Progression {
            base: Complex64::new(0.0, 0.5 * std::f64::consts::PI),
            step: Complex64::new(0.0, std::f64::consts::PI),
        },
    };
    println!("{:>6} {:>12} {:>14} {:>12} {:>14}", "r", "n(r)", "N(r)", "m(r)", "T(r)");
    let radii: Vec<f64> = (0..9).map(|i| 4.0 + 1.25 * i as f64).collect();
    for &r in &radii {
        let n = pole_count(&source, r).unwrap();
        let nn = counting_n(&source, r).unwrap();
        let m = proximity_m(&f, r, 512).unwrap();
        println!("{r:>6.2} {n:>12.0} {nn:>14.3} {m:>12.4} {:>14.3}", m + nn);
    }
    let curve = hayman_check(&f, &source, &radii, 512).unwrap();
    if let Some((b, c)) = curve.hayman_fit {
        println!("\nfit: log T ~ log a + b r^c  with b = {b:.4}, c = {c:.3}");
    }
    if let Some((rho1, rho2)) = curve.fitted_order {
        println!("order estimates: rho1 = {rho1:.3}, rho2 = {rho2:.3}");
    }
}
