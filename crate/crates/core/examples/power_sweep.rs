//! Minimum bounds against transmit power, written as CSV through the sweep harness.

use bistatic_isac::harness::{run_crb_sweep, write_sweep, Format, HarnessConfig, Meta};

fn main() -> bistatic_isac::Result<()> {
    // target gain chosen so the Gaussian-only bound drops 10.36 dB between 30 and 40 dBm
    let cfg = HarnessConfig::from_toml_str(
        r#"
        [scenario]
        alpha_power_db = -129.97

        [sweep]
        axis = "power_dbm"
        values = [-10.0, 0.0, 10.0, 20.0, 30.0, 40.0]
        schemes = ["gaussian", "deterministic", "superposed:0.1"]
        "#,
    )?;
    let res = run_crb_sweep(&cfg)?;
    write_sweep(std::io::stdout().lock(), &res, &Meta::new("crb-sweep", &cfg, false), Format::Csv)
}
