//! The amplitude algorithm on a hand-written waveform: local extrema from
//! gradient sign changes, then the median of adjacent extremum differences.
//!
//!     cargo run --example extrema

use tremor_core::amplitude::{find_extrema, instantaneous_amplitudes, median_amplitude};

fn main() -> tremor_core::Result<()> {
    // a plateau at the second peak and one outlier swing
    let x = [
        0.0, 4.0, 10.0, 3.0, -1.0, 6.0, 9.0, 9.0, 2.0, -30.0, 8.0, 1.0,
    ];
    let e = find_extrema(&x)?;
    println!("extrema at {:?}: {:?}", e.indices, e.values);

    let a = instantaneous_amplitudes(&e);
    println!("instantaneous amplitudes {a:?}");
    println!("median {}", median_amplitude(&a));
    Ok(())
}
