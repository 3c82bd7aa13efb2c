//! Pixel distances to centimetres for the bundled iPhone XR front camera.
//!
//!     cargo run --example camera_conversion

use tremor_core::camera::{cm_to_pixels, propagate_depth_error, DEPTH_RMSE_100CM, DEPTH_RMSE_40CM};
use tremor_core::landmark::default_camera;
use tremor_core::{pixels_to_cm, scene_scale, Result};

fn main() -> Result<()> {
    let cam = default_camera();
    println!("crop factor {:.4}", cam.crop_factor());

    for depth in [40.0, 50.0, 75.0, 100.0] {
        let s = scene_scale(&cam, depth)?;
        println!(
            "depth {depth:>5} cm: view {:.1} mm wide, {:.4} mm/px, 100 px = {:.3} cm",
            s.view_width_mm,
            s.mm_per_px,
            pixels_to_cm(100.0, &cam, depth)?
        );
    }

    // how many pixels a 2 cm tremor spans at each distance
    for depth in [50.0, 100.0] {
        println!(
            "2 cm at {depth} cm = {:.1} px",
            cm_to_pixels(2.0, &cam, depth)?
        );
    }

    // LiDAR depth error carried into a 5 cm amplitude
    println!(
        "5 cm at 40 cm: +/- {:.4} cm, at 100 cm: +/- {:.4} cm",
        propagate_depth_error(5.0, 40.0, DEPTH_RMSE_40CM)?,
        propagate_depth_error(5.0, 100.0, DEPTH_RMSE_100CM)?
    );
    Ok(())
}
