//! Propagates a single solitary wave and prints invariants and error norms.
//!
//! Run with `cargo run --release --example single_wave`.

use grlw::analytic::SolitonProfile;
use grlw::assembly::fit_initial_coefficients;
use grlw::element::ModelParams;
use grlw::integrator::{run, TimeParams};
use grlw::spline::Mesh;

fn main() -> grlw::Result<()> {
    // u_t + u_x + 6 u² u_x − u_xxt = 0 on [0, 100]; the wave starts at
    // x = 40 with unit amplitude and travels at speed 2.
    let params = ModelParams::new(2, 1.0, 1.0, 40.0)?;
    let mesh = Mesh::with_spacing(0.0, 100.0, 0.2)?;
    let profile = SolitonProfile::new(&params)?;
    let initial = fit_initial_coefficients(|x| profile.eval(x, 0.0), &mesh)?;

    let mut tp = TimeParams::new(0.025, 10.0);
    tp.report_times = vec![2.0, 4.0, 6.0, 8.0, 10.0];

    let exact = |x: f64, t: f64| profile.eval(x, t);
    let result = run(&initial, &params, &mesh, &tp, Some(&exact), |_| {})?;
    if let Some(err) = result.failure {
        return Err(err);
    }

    println!("    t        I1         I2         I3       L2 error    peak");
    for d in &result.diagnostics {
        println!(
            "{:5.1}  {:9.6}  {:9.6}  {:9.6}  {:.4e}  {:7.5}",
            d.t,
            d.i1,
            d.i2,
            d.i3,
            d.l2.unwrap(),
            d.amplitude
        );
    }
    Ok(())
}
