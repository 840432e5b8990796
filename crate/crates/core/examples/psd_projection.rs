//! Projects an indefinite correlation estimate onto the PSD cone under the
//! elementwise max-norm and compares with eigenvalue clipping.

use latent_copula::latent_corr::LatentCorrelationMatrix;
use latent_copula::linalg::{clip_negative_eigenvalues, max_abs, min_eigenvalue};
use latent_copula::psd::{project_psd_maxnorm, PsdConfig};
use nalgebra::DMatrix;

fn main() -> latent_copula::Result<()> {
    let r = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, -0.6, 0.9, 1.0, 0.4, -0.6, 0.4, 1.0]);
    println!("input smallest eigenvalue {:.4}", min_eigenvalue(&r));

    let p = project_psd_maxnorm(&LatentCorrelationMatrix::new(r.clone()), &PsdConfig::default())?;
    let clip = clip_negative_eigenvalues(&r);
    println!("max-norm projection:   distance {:.4}, min eigenvalue {:.2e}", p.distance, min_eigenvalue(&p.matrix.r));
    println!("eigenvalue clipping:   distance {:.4}", max_abs(&(&clip - &r)));
    println!("{:.4}", p.matrix.r);

    let unit = PsdConfig {
        unit_diagonal: true,
        ..PsdConfig::default()
    };
    let q = project_psd_maxnorm(&LatentCorrelationMatrix::new(r), &unit)?;
    println!("unit-diagonal variant:\n{:.4}", q.matrix.r);
    Ok(())
}
