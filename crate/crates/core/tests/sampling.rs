use qharness::kernels::kernel_measure;
use qharness::markov::{sample_paths, TimeGrid};
use qharness::{KernelCoordinates, ProcessParams};

/// Conditional law of the second step matches its kernel: the empirical
/// frequencies of the next node, given the first one, against the weights.
#[test]
fn transition_frequencies_match_the_kernel() {
    let params = ProcessParams::new(0.3, 0.5, 0.4).unwrap();
    let grid = TimeGrid::new(vec![0.8, 2.0]).unwrap();
    let nodes = 6;
    let e = sample_paths(&params, &grid, 5, 60_000, nodes, None).unwrap();
    let first = kernel_measure(&params, &KernelCoordinates::marginal(0.8).unwrap(), nodes).unwrap();
    for (&x, &wx) in first.nodes().iter().zip(first.weights()) {
        let rows: Vec<&Vec<f64>> = e.values.iter().filter(|r| r[0] == x).collect();
        let n = rows.len() as f64;
        assert!((n / e.len() as f64 - wx).abs() < 5.0 * (wx * (1.0 - wx) / e.len() as f64).sqrt());
        if n < 500.0 {
            continue;
        }
        let k = kernel_measure(&params, &KernelCoordinates::new(x, 0.8, 2.0).unwrap(), nodes).unwrap();
        for (&y, &w) in k.nodes().iter().zip(k.weights()) {
            let freq = rows.iter().filter(|r| r[1] == y).count() as f64 / n;
            assert!((freq - w).abs() < 5.0 * (w * (1.0 - w) / n).sqrt() + 1e-9, "x={x} y={y}: {freq} vs {w}");
        }
    }
}

#[test]
fn increments_have_the_stated_variance() {
    let params = ProcessParams::new(-0.7, 0.2, 0.8).unwrap();
    let grid = TimeGrid::new(vec![1.0, 1.6]).unwrap();
    let e = sample_paths(&params, &grid, 99, 20_000, 40, Some(2)).unwrap();
    let n = e.len() as f64;
    let d: Vec<f64> = e.values.iter().map(|r| r[1] - r[0]).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| v * v).sum::<f64>() / n;
    assert!(mean.abs() < 4.0 * (0.6f64 / n).sqrt());
    assert!((var - 0.6).abs() < 0.05);
}
