//! Gaussian-only transmit design under a user SINR target, checked against its closed form.

use bistatic_isac::array::UlaConfig;
use bistatic_isac::beamform::{mrt_cov, solve_p2};
use bistatic_isac::channel::{rician_cu_channel, Scenario};
use bistatic_isac::fim::{crb_gaussian, crb_sinr_gaussian_closed};
use bistatic_isac::linalg::linear_to_db;
use num_complex::Complex64;

fn main() -> bistatic_isac::Result<()> {
    let ula = UlaConfig::half_wavelength(16, 16)?;
    let base = Scenario {
        ula,
        theta: 0.0,
        phi: 0.0,
        alpha: Complex64::new(1e-6, 0.0),
        h: rician_cu_channel(&ula, 1.0, 30f64.to_radians(), 1e-5, 0),
        p_max: 1.0,
        sigma_c2: 1e-11,
        sigma_s2: 1e-11,
        t_symbols: 1024,
        gamma0: 0.0,
    };
    let mrt_sinr = mrt_cov(base.p_max, &base.a()).quad(&base.h) / base.sigma_c2;
    let bound = base.sinr_bound();
    println!("target MRT gives the user {:.1} dB; the largest SINR is {:.1} dB", linear_to_db(mrt_sinr), linear_to_db(bound));
    println!("{:>10} {:>12} {:>12} {:>10} {:>6}", "SINR dB", "CRB dB", "closed dB", "user dB", "rank");
    for k in 0..=10 {
        let g0 = bound * k as f64 / 10.0;
        let sc = base.with_gamma0(g0);
        let r = solve_p2(&sc)?;
        println!(
            "{:>10.2} {:>12.4} {:>12.4} {:>10.2} {:>6}",
            linear_to_db(g0),
            linear_to_db(crb_gaussian(&sc, &r)?),
            linear_to_db(crb_sinr_gaussian_closed(&sc)?),
            linear_to_db(r.quad(&sc.h) / sc.sigma_c2),
            r.rank()
        );
    }
    Ok(())
}
