//! Benchmark fixtures shared by the criterion benches in `benches/`.

use pnc_lab_core::channel::fill_channel;
use pnc_lab_core::{ChannelRealization, RngStream};

/// `count` channel draws for an `(n_a, n_r, n_b)` setup from a fixed seed.
pub fn channels(n_a: usize, n_r: usize, n_b: usize, count: usize) -> Vec<ChannelRealization> {
    let mut rng = RngStream::new(42, 0, 0).rng();
    (0..count)
        .map(|_| {
            let mut c = ChannelRealization::zeros(n_a, n_r, n_b);
            fill_channel(&mut c, &mut rng);
            c
        })
        .collect()
}
