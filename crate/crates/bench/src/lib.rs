//! Benchmark inputs shared by the criterion benches.

use kh_core::constructions::{build_companion, trefoil_ears, CompanionBundle};
use kh_core::diagram::parse_diagram;
use kh_core::Diagram;

pub const TREFOIL: &str = "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]";
pub const FIGURE_EIGHT: &str = "X[4,2,5,1];X[8,6,1,5];X[6,3,7,4];X[2,7,3,8]";

pub fn companion(n: usize) -> CompanionBundle {
    build_companion(&vec![trefoil_ears(); n]).expect("companion builds")
}

/// Named diagrams from 3 to 11 crossings.
pub fn diagrams() -> Vec<(String, Diagram)> {
    let mut out = vec![
        ("trefoil".to_string(), parse_diagram(TREFOIL).unwrap()),
        ("figure-eight".to_string(), parse_diagram(FIGURE_EIGHT).unwrap()),
    ];
    for n in 1..=3 {
        out.push((format!("companion-n{n}"), companion(n).companion));
    }
    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_have_expected_sizes() {
        let sizes: Vec<usize> = super::diagrams().iter().map(|(_, d)| d.crossing_count()).collect();
        assert_eq!(sizes, vec![3, 4, 5, 8, 11]);
    }
}
