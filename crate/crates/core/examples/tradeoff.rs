//! Bound against user rate for every design, from zero rate to the largest achievable.

use bistatic_isac::harness::{run_tradeoff, HarnessConfig, RowStatus};

fn main() -> bistatic_isac::Result<()> {
    let probe = HarnessConfig::reference_preset()?;
    let r_max = (1.0 + probe.scenario.build(&probe.path_loss)?.sinr_bound()).log2();
    let values: Vec<String> = (0..=12).map(|k| format!("{:?}", r_max * k as f64 / 12.0)).collect();
    let schemes = ["gaussian", "known", "superposed", "power-splitting", "time-switching"];
    let cfg = HarnessConfig::from_toml_str(&format!(
        "[scenario]\nalpha_power_db = -130.0\n[sweep]\naxis = \"rate_bps\"\nvalues = [{}]\nschemes = {schemes:?}\n",
        values.join(", ")
    ))?;
    let res = run_tradeoff(&cfg)?;
    print!("{:>8}", "rate");
    for s in schemes {
        print!("{s:>17}");
    }
    println!();
    for chunk in res.rows.chunks(schemes.len()) {
        print!("{:>8.3}", chunk[0].axis_value);
        for r in chunk {
            match (r.status, r.crb_db) {
                (RowStatus::Ok, Some(db)) => print!("{db:>17.3}"),
                (s, _) => print!("{:>17}", s.as_str()),
            }
        }
        println!();
    }
    Ok(())
}
