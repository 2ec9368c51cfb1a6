//! Phase folding.

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{Circuit, Gate};
use crate::error::Result;

use super::phase::{gray_walk, pivot_of, trace, Trace, ZERO_COEFFICIENT};
use super::report::{PassReport, Tally};

fn foldable(g: &Gate) -> bool {
    matches!(g, Gate::X { .. } | Gate::Cnot { .. } | Gate::Rz { .. })
}

/// Merges rotations that act on the same parity.
///
/// Each maximal run of `{X, CNOT, RZ}` gates is folded on its own; other
/// gates stay where they are. A run whose linear part telescopes to the
/// identity is rebuilt as one Gray walk per target wire, reusing the
/// run's own CNOT sources so zero-angle steps keep their place. Otherwise,
/// or when the rebuilt run would be longer, rotations are merged into the
/// first gate of their parity and the CNOT skeleton is left untouched.
/// The result is never longer than the input, and folding twice gives the
/// same circuit as folding once.
pub fn fold_phases(circuit: &Circuit) -> Result<(Circuit, PassReport)> {
    let gates = circuit.gates();
    let mut out = Vec::with_capacity(gates.len());
    let mut tally = Tally::default();
    let mut i = 0;
    while i < gates.len() {
        if !foldable(&gates[i]) {
            out.push(gates[i].clone());
            i += 1;
            continue;
        }
        let start = i;
        while i < gates.len() && foldable(&gates[i]) {
            i += 1;
        }
        out.extend(fold_run(&gates[start..i], circuit.width(), &mut tally)?);
    }
    let result = Circuit::from_gates(circuit.width(), out)?;
    let report = tally.finish("fold_phases", circuit, &result);
    Ok((result, report))
}

fn fold_run(run: &[Gate], width: usize, tally: &mut Tally) -> Result<Vec<Gate>> {
    let t = trace(run, width)?;
    let merged = merge_in_place(run, &t);
    let dense = if t.rows.iter().enumerate().all(|(q, r)| *r == 1 << q) { Some(rebuild(&t, width)?) } else { None };
    match dense {
        Some(d) if d.len() <= merged.len() => {
            tally.add("run rebuilt as gray walks", 1);
            tally.add("gates removed", run.len().saturating_sub(d.len()));
            Ok(d)
        }
        _ => {
            tally.add("rotations merged in place", run.len().saturating_sub(merged.len()));
            Ok(merged)
        }
    }
}

fn merge_in_place(run: &[Gate], t: &Trace) -> Vec<Gate> {
    let mut hits: BTreeMap<u64, usize> = BTreeMap::new();
    for (y, _) in t.seen.iter().flatten() {
        *hits.entry(*y).or_insert(0) += 1;
    }
    let mut placed = BTreeSet::new();
    let mut out = Vec::with_capacity(run.len());
    for (g, seen) in run.iter().zip(&t.seen) {
        match (g, seen) {
            (Gate::Rz { qubit, angle }, Some((y, flipped))) => {
                if hits[y] == 1 {
                    out.push(Gate::rz(*qubit, *angle));
                } else if placed.insert(*y) {
                    let a = t.sums[y];
                    if a.abs() > ZERO_COEFFICIENT {
                        out.push(Gate::rz(*qubit, if *flipped { -a } else { a }));
                    }
                }
            }
            _ => out.push(g.clone()),
        }
    }
    out
}

fn rebuild(t: &Trace, width: usize) -> Result<Vec<Gate>> {
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for y in t.sums.keys() {
        let p = pivot_of(*y);
        groups.entry(p).or_default().extend((0..p).filter(|b| y >> b & 1 == 1));
    }
    for (p, controls) in groups.iter_mut() {
        controls.extend(t.fan_in[*p].iter().filter(|&&c| c < *p));
    }
    let mut out = Vec::new();
    for (pivot, controls) in groups {
        let controls: Vec<usize> = controls.into_iter().collect();
        gray_walk(pivot, &controls, |y| t.sums.get(&y).copied(), true, &mut out)?;
    }
    out.extend((0..width).filter(|q| t.offset >> q & 1 == 1).map(Gate::x));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::decompose_all;
    use crate::unitary::phase_distance;

    #[test]
    fn four_rotation_example() {
        let (t0, t1) = (0.9, -0.4);
        let c = Circuit::from_gates(
            2,
            [
                Gate::rz(1, t0),
                Gate::cnot(0, 1),
                Gate::rz(1, t0),
                Gate::cnot(0, 1),
                Gate::rz(1, t1),
                Gate::cnot(0, 1),
                Gate::rz(1, -t1),
                Gate::cnot(0, 1),
            ],
        )
        .unwrap();
        let (f, _) = fold_phases(&c).unwrap();
        assert_eq!(f.gates(), &[Gate::rz(1, t0 + t1), Gate::cnot(0, 1), Gate::rz(1, t0 - t1), Gate::cnot(0, 1)]);
    }

    #[test]
    fn two_selector_example() {
        // two 2-controlled selectors: |10> with angle θi and |11> with angle θj
        let (ti, tj) = (0.7, 1.1);
        let c = Circuit::from_gates(
            3,
            [Gate::x(0), Gate::mcrz(vec![0, 1], 2, -ti), Gate::x(0), Gate::mcrz(vec![0, 1], 2, tj)],
        )
        .unwrap();
        let (pushed, _) = super::super::push_paulis(&decompose_all(&c).unwrap()).unwrap();
        assert_eq!(pushed.len(), 16);
        let (f, _) = fold_phases(&pushed).unwrap();
        let angles: Vec<f64> = f.gates().iter().filter_map(|g| g.angle()).collect();
        let want = [(tj - ti) / 4.0, -(ti + tj) / 4.0, (ti + tj) / 4.0, (ti - tj) / 4.0];
        assert_eq!(f.len(), 8);
        for (a, w) in angles.iter().zip(want) {
            assert!((a - w).abs() < 1e-15);
        }
        assert!(phase_distance(&c, &f).unwrap() <= 1e-10);
    }

    #[test]
    fn idempotent_and_never_longer() {
        let c = Circuit::from_gates(
            3,
            [
                Gate::rz(0, 0.1),
                Gate::cnot(0, 1),
                Gate::rz(1, 0.2),
                Gate::x(2),
                Gate::cnot(1, 2),
                Gate::rz(2, 0.3),
                Gate::rz(1, 0.4),
                Gate::h(0),
                Gate::rz(0, 0.5),
                Gate::rz(0, -0.5),
            ],
        )
        .unwrap();
        let (f, report) = fold_phases(&c).unwrap();
        assert!(f.len() <= c.len());
        assert_eq!(report.after, f.counts());
        assert_eq!(fold_phases(&f).unwrap().0, f);
        assert!(phase_distance(&c, &f).unwrap() <= 1e-10);
    }

    #[test]
    fn affine_offset_is_restored_by_trailing_x() {
        let c = Circuit::from_gates(2, [Gate::x(0), Gate::rz(0, 0.3), Gate::rz(0, 0.2), Gate::x(1)]).unwrap();
        let (f, _) = fold_phases(&c).unwrap();
        assert!(f.len() <= 3);
        assert!(phase_distance(&c, &f).unwrap() <= 1e-12);
    }
}
