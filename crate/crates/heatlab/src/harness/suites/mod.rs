use heatlab_core::ConvexBody;

use super::SuiteInfo;

mod diagonal;
mod geometry;
mod good;
mod kernels;
mod traces;

pub(crate) fn unit_box(d: usize) -> ConvexBody {
    ConvexBody::cuboid(vec![1.0; d]).expect("unit box")
}

pub(crate) fn boxed(lengths: &[f64]) -> ConvexBody {
    ConvexBody::cuboid(lengths.to_vec()).expect("positive lengths")
}

/// `n` equispaced points covering `[0, l]` including both ends.
pub(crate) fn linspace(l: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * l];
    }
    (0..n).map(|k| l * k as f64 / (n - 1) as f64).collect()
}

/// Tensor grid over the box `Π [0, L_i]` with `n` points per axis.
pub(crate) fn box_grid(lengths: &[f64], n: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = lengths.iter().map(|&l| linspace(l, n)).collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

pub(crate) fn box_lengths(body: &ConvexBody) -> Option<Vec<f64>> {
    match body {
        ConvexBody::Box(b) => Some(b.lengths().to_vec()),
        _ => None,
    }
}

/// Pads a point to two coordinates for fixed-width CSV rows.
pub(crate) fn xy(x: &[f64]) -> (f64, f64) {
    (x[0], x.get(1).copied().unwrap_or(f64::NAN))
}

pub(crate) static REGISTRY: &[SuiteInfo] = &[
    kernels::CROSS_METHOD,
    kernels::CONSERVATION,
    kernels::KERNEL_BOUNDS,
    traces::REMAINDER_ORACLE,
    traces::REMAINDER_SCALING,
    traces::REMAINDER_SMALL_TIME,
    traces::REMAINDER_LARGE_TIME,
    traces::KROGER,
    diagonal::BULK_DIAGONAL,
    diagonal::BOUNDARY_DIAGONAL,
    diagonal::BULK_REFINED,
    geometry::LAYER_CAKE,
    geometry::CONVEX_TOOLBOX,
    geometry::LOCAL_VOLUME_INTEGRAL,
    geometry::DUHAMEL_MASS,
    good::GOOD_SETS,
];
