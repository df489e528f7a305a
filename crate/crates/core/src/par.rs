//! Batch evaluation helpers. With the `parallel` feature (default) batches
//! run on the rayon pool; without it they run sequentially. The `_seq`
//! variants are always available.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Unitary;
use crate::optics::{propagate_validated, ModeAmplitudes, OpticalNetlist};

/// Map `f` over `items`, in parallel when the feature is enabled.
pub fn map_batch<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_batch_seq(items, f)
    }
}

pub fn map_batch_seq<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

fn check_inputs(net: &OpticalNetlist, inputs: &[ModeAmplitudes]) -> Result<()> {
    net.validate()?;
    if let Some(bad) = inputs.iter().find(|i| *i.space() != net.space) {
        return Err(Error::DimensionMismatch {
            expected: net.space.dim(),
            got: bad.space().dim(),
        });
    }
    Ok(())
}

/// Propagate many inputs through one netlist.
pub fn propagate_batch(
    net: &OpticalNetlist,
    inputs: &[ModeAmplitudes],
) -> Result<Vec<ModeAmplitudes>> {
    check_inputs(net, inputs)?;
    Ok(map_batch(inputs, |i| propagate_validated(net, i)))
}

pub fn propagate_batch_seq(
    net: &OpticalNetlist,
    inputs: &[ModeAmplitudes],
) -> Result<Vec<ModeAmplitudes>> {
    check_inputs(net, inputs)?;
    Ok(map_batch_seq(inputs, |i| propagate_validated(net, i)))
}

/// Netlist unitary assembled column by column from streamed propagation of
/// each basis mode.
pub fn streamed_unitary(net: &OpticalNetlist) -> Result<Unitary> {
    let inputs = (0..net.space.dim())
        .map(|m| ModeAmplitudes::single(net.space, m))
        .collect::<Result<Vec<_>>>()?;
    let cols: Vec<_> = propagate_batch(net, &inputs)?
        .into_iter()
        .map(ModeAmplitudes::into_amplitudes)
        .collect();
    Ok(Unitary::from_columns(&cols))
}
