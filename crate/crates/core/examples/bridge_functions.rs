//! Population Kendall's tau of thresholded latent normals as a function of
//! the latent correlation, and its inverse.

use latent_copula::latent_corr::{bridge_f, bridge_f_inverse, bridge_h, bridge_h_inverse, continuous_pair_transform};

fn main() -> latent_copula::Result<()> {
    let cutoffs = [(0.0, 0.0), (0.5, -0.5), (1.5, 1.5)];
    println!("{:>6} {:>22} {:>10} {:>10}", "t", "cutoffs", "tau", "inverted");
    for &(dj, dk) in &cutoffs {
        for t in [-0.8, -0.3, 0.0, 0.3, 0.8] {
            let tau = bridge_f(t, dj, dk)?;
            let back = bridge_f_inverse(tau, dj, dk).value();
            println!("{t:>6.2} {:>22} {tau:>10.6} {back:>10.6}", format!("({dj}, {dk})"));
        }
    }

    // a binary column against a continuous one
    for t in [-0.6, 0.0, 0.6] {
        let tau = bridge_h(t, 0.7)?;
        println!("mixed t = {t:>5.2}: tau = {tau:.6}, inverted {:.6}", bridge_h_inverse(tau, 0.7).value());
    }

    // two continuous columns need no cutoff
    println!("continuous tau = 0.5 -> r = {:.6}", continuous_pair_transform(0.5));
    Ok(())
}
