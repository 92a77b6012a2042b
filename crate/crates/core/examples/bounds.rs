//! DoA bounds of the three signaling modes for one array and target.

use bistatic_isac::array::{steering_rx_deriv_norm_sqr, UlaConfig};
use bistatic_isac::beamform::mrt_cov;
use bistatic_isac::channel::{rician_cu_channel, Scenario};
use bistatic_isac::fim::{crb_min_closed_forms, crb_report};
use bistatic_isac::linalg::{complex_normal_matrix, linear_to_db, HermitianCov};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bistatic_isac::Result<()> {
    let ula = UlaConfig::half_wavelength(16, 16)?;
    let sc = Scenario {
        ula,
        theta: 0.4,
        phi: -0.1,
        alpha: Complex64::from_polar(3e-7, 0.7),
        h: rician_cu_channel(&ula, 1.0, 0.5, 1e-7, 3),
        p_max: 1.0,
        sigma_c2: 1e-11,
        sigma_s2: 1e-11,
        t_symbols: 256,
        gamma0: 0.0,
    };
    println!("||b'||^2 at theta = 0.4: {:.3}", steering_rx_deriv_norm_sqr(&ula, sc.theta));

    let mins = crb_min_closed_forms(&sc);
    println!("minimum CRB (rad^2, dB)");
    for (name, v) in [("gaussian", mins.gaussian), ("deterministic", mins.deterministic), ("superposed", mins.superposed)] {
        println!("  {name:<14}{v:.3e}  {:7.2}", linear_to_db(v));
    }

    // half the power in each part of target MRT, then a random covariance split the same way
    let half = mrt_cov(0.5, &sc.a());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = complex_normal_matrix(&mut rng, 16, 16);
    let random = HermitianCov::new(&g * g.adjoint())?;
    let random = random.scaled(0.5 / random.trace());
    for (name, r) in [("target MRT", half), ("random", random)] {
        let rep = crb_report(&sc, &r, &r)?;
        println!(
            "{name:<11} gaussian {:7.2} dB  superposed {:7.2} dB  deterministic {:7.2} dB  radar SNR {:5.1} dB",
            linear_to_db(rep.crb_gaussian),
            linear_to_db(rep.crb_super),
            linear_to_db(rep.crb_deterministic),
            linear_to_db(rep.gamma_ran)
        );
    }
    Ok(())
}
