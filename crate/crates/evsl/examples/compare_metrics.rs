//! Scores frame pairs with RMSE, PSNR, and HSV histogram correlation.
//! A clean chart image is compared with itself and with copies degraded by
//! seeded Gaussian noise of growing strength.

use evsl::charts::chart24;
use evsl::color::Rgb8Frame;
use evsl::metrics::{histogram_correlation, psnr_db, rmse_per_channel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() {
    let map = chart24();
    let mut clean = Rgb8Frame::new(map.width, map.height);
    for y in 0..map.height {
        for x in 0..map.width {
            let a = map.texel(x, y);
            clean.set(x, y, [
                (a[0] * 255.0).round() as u8,
                (a[1] * 255.0).round() as u8,
                (a[2] * 255.0).round() as u8,
            ]);
        }
    }

    println!("{:>10}  {:>8}  {:>8}  {:>8}  {:>9}  {:>6}", "sigma", "rmse_r", "rmse_g", "rmse_b", "psnr_db", "hc");
    for sigma in [0.0, 2.0, 8.0, 24.0] {
        let noisy = if sigma == 0.0 {
            clean.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let normal = Normal::new(0.0, sigma).expect("valid sigma");
            let data = clean
                .data
                .iter()
                .map(|&v| (v as f64 + normal.sample(&mut rng)).clamp(0.0, 255.0).round() as u8)
                .collect();
            Rgb8Frame::from_data(clean.width, clean.height, data)
        };
        let rmse = rmse_per_channel(&noisy, &clean).expect("rmse");
        let psnr = psnr_db(&noisy, &clean).expect("psnr");
        let hc = histogram_correlation(&noisy, &clean).expect("hc");
        println!(
            "{sigma:>10.1}  {:>8.3}  {:>8.3}  {:>8.3}  {:>9.2}  {hc:>6.4}",
            rmse.r, rmse.g, rmse.b, psnr
        );
    }
    println!("\nidentical frames score RMSE 0 exactly and infinite PSNR");
}
