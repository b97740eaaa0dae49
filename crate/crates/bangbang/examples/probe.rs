// scratch probe; deleted before release
use bangbang::bath::*;
use bangbang::oracle::*;

fn main() {
    let bath = BathSpec::new(0.25, 100.0).unwrap();
    let t = 0.01;
    let schedule = PulseSchedule::uniform(16, t).unwrap();
    for budget in [500usize, 1000, 2000, 4000, 8000, 16000, 32000] {
        let quad = QuadratureSpec {
            rel_tol: 1e-30,
            abs_tol: 1e-300,
            max_refinements: budget,
            omega_max_factor: 30.0,
        };
        match decoherence_exponent_detailed(&bath, t, &schedule, &quad) {
            Ok(out) => println!("budget {budget}: value {} err {} refs {}", out.value, out.error_estimate, out.refinements),
            Err(bangbang::Error::Convergence { achieved, refinements, .. }) => {
                println!("budget {budget}: NOT CONVERGED achieved {achieved} refs {refinements}");
            }
            Err(e) => println!("budget {budget}: {e}"),
        }
    }
    // with the relaxed default spec
    let quad = QuadratureSpec::default();
    match decoherence_exponent_detailed(&bath, t, &schedule, &quad) {
        Ok(out) => println!("default spec: value {} err {} refs {}", out.value, out.error_estimate, out.refinements),
        Err(e) => println!("default spec: {e}"),
    }

    // discrete refinement curve
    let echo = PulseSchedule::from_times(vec![0.01]).unwrap();
    let tight = QuadratureSpec { rel_tol: 1e-12, abs_tol: 1e-15, max_refinements: 60000, omega_max_factor: 30.0 };
    let exact = decoherence_exponent(&bath, 0.02, &echo, &tight).unwrap();
    println!("exact echo = {exact}");
    for modes in [2_000usize, 8_000, 32_000, 128_000] {
        let db = DiscreteBath::from_spectral_density(&bath, modes, 20.0 * bath.omega_c).unwrap();
        let g = discrete_bath_exponent(&db, 0.02, &echo, 1.0).unwrap();
        println!("K={modes}: discrete {} |err| {:.3e}", g, (g - exact).abs());
    }
}
