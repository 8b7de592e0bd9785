//! Pauli-string algebra: the 1D Heisenberg builder, file ingestion for
//! arbitrary Pauli-sum Hamiltonians, and the symbolic shifted-square
//! (H - sI)^2 used as the drift-dependent cost operator.
//!
//! Convention: position q of a Pauli string acts on qubit q, and qubit q is
//! bit q of the basis-state index (little-endian).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::ComplexMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum HamiltonianError {
    #[error("Pauli strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("chain needs at least 2 sites, got {0}")]
    InvalidSize(usize),
    #[error("term has wrong string length for {expected}-qubit system: {found}")]
    WrongStringLength { expected: usize, found: usize },
    #[error("coefficient of {string} has imaginary part {imag:.3e}")]
    NonHermitian { string: String, imag: f64 },
    #[error("dense realization capped at 13 qubits, got {0}")]
    TooLarge(usize),
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
}

pub const COEFF_PRUNE_TOL: f64 = 1e-12;
const DENSE_QUBIT_CAP: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-qubit product a*b = phase * c with phase in {1, -1, i, -i}.
    fn multiply(a: Pauli, b: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        let one = Complex64::ONE;
        let i = Complex64::I;
        match (a, b) {
            (I, p) => (one, p),
            (p, I) => (one, p),
            (X, X) | (Y, Y) | (Z, Z) => (one, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
        }
    }
}

/// A tensor product of single-qubit Paulis; position q acts on qubit q.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(paulis: Vec<Pauli>) -> Self {
        Self(paulis)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    /// Identity everywhere except `pauli` on `qubit`.
    pub fn single(n: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut v = vec![Pauli::I; n];
        v[qubit] = pauli;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.0
    }

    pub fn parse(text: &str) -> Option<Self> {
        text.chars().map(Pauli::from_char).collect::<Option<Vec<_>>>().map(Self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

/// Positionwise product p*q = phase * r; phase is a fourth root of unity.
pub fn multiply_pauli_strings(
    p: &PauliString,
    q: &PauliString,
) -> Result<(Complex64, PauliString), HamiltonianError> {
    if p.len() != q.len() {
        return Err(HamiltonianError::LengthMismatch(p.len(), q.len()));
    }
    let mut phase = Complex64::ONE;
    let mut out = Vec::with_capacity(p.len());
    for (&a, &b) in p.paulis().iter().zip(q.paulis()) {
        let (ph, r) = Pauli::multiply(a, b);
        phase *= ph;
        out.push(r);
    }
    Ok((phase, PauliString(out)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        Self { coefficient: Complex64::new(coefficient, 0.0), string }
    }
}

/// A Hermitian operator as a sum of Pauli strings with real coefficients.
/// Terms are merged, pruned below 1e-12, and kept in lexicographic string
/// order, so equal operators have identical representations.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSumHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSumHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self, HamiltonianError> {
        let mut merged: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for term in terms {
            if term.string.len() != n_qubits {
                return Err(HamiltonianError::WrongStringLength {
                    expected: n_qubits,
                    found: term.string.len(),
                });
            }
            *merged.entry(term.string).or_insert(Complex64::ZERO) += term.coefficient;
        }
        let mut kept = Vec::with_capacity(merged.len());
        for (string, coefficient) in merged {
            if coefficient.norm() < COEFF_PRUNE_TOL {
                continue;
            }
            if coefficient.im.abs() > COEFF_PRUNE_TOL {
                return Err(HamiltonianError::NonHermitian {
                    string: string.to_string(),
                    imag: coefficient.im,
                });
            }
            kept.push(PauliTerm { coefficient, string });
        }
        Ok(Self { n_qubits, terms: kept })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Dense 2^n x 2^n realization. Qubit q is bit q of the row/column index.
    pub fn to_dense(&self) -> Result<ComplexMatrix, HamiltonianError> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(HamiltonianError::TooLarge(self.n_qubits));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = ComplexMatrix::zeros(dim);
        for term in &self.terms {
            for col in 0..dim {
                let mut row = col;
                let mut amp = term.coefficient;
                for (q, &p) in term.string.paulis().iter().enumerate() {
                    let bit = (col >> q) & 1;
                    match p {
                        Pauli::I => {}
                        Pauli::X => row ^= 1 << q,
                        Pauli::Y => {
                            row ^= 1 << q;
                            amp *= if bit == 0 { Complex64::I } else { -Complex64::I };
                        }
                        Pauli::Z => {
                            if bit == 1 {
                                amp = -amp;
                            }
                        }
                    }
                }
                m.add_to(row, col, amp);
            }
        }
        Ok(m)
    }

    /// One term per line as `<coefficient> <string>`, preceded by a
    /// `# n_qubits=N` comment so even an empty operator round-trips.
    /// Coefficients print in shortest exact form, so parsing the output
    /// recovers bit-identical values.
    pub fn serialize(&self) -> String {
        let mut out = format!("# n_qubits={}\n", self.n_qubits);
        for term in &self.terms {
            out.push_str(&format!("{} {}\n", term.coefficient.re, term.string));
        }
        out
    }
}

/// Open-chain Heisenberg Hamiltonian
/// H = -1/2 sum_j (Jx X_j X_{j+1} + Jy Y_j Y_{j+1} + Jz Z_j Z_{j+1} + h Z_j)
/// over bonds j = 0..n-2, so the field sits on every site except the last.
/// `field_all_sites` adds the missing -h/2 Z on the last site for the
/// conventional uniform-field variant.
pub fn build_heisenberg_1d(
    n: usize,
    jx: f64,
    jy: f64,
    jz: f64,
    h: f64,
    field_all_sites: bool,
) -> Result<PauliSumHamiltonian, HamiltonianError> {
    if n < 2 {
        return Err(HamiltonianError::InvalidSize(n));
    }
    let mut terms = Vec::new();
    let bond = |q: usize, p: Pauli, coupling: f64, terms: &mut Vec<PauliTerm>| {
        if coupling == 0.0 {
            return;
        }
        let mut v = vec![Pauli::I; n];
        v[q] = p;
        v[q + 1] = p;
        terms.push(PauliTerm::new(-0.5 * coupling, PauliString(v)));
    };
    for j in 0..n - 1 {
        bond(j, Pauli::X, jx, &mut terms);
        bond(j, Pauli::Y, jy, &mut terms);
        bond(j, Pauli::Z, jz, &mut terms);
        if h != 0.0 {
            terms.push(PauliTerm::new(-0.5 * h, PauliString::single(n, j, Pauli::Z)));
        }
    }
    if field_all_sites && h != 0.0 {
        terms.push(PauliTerm::new(-0.5 * h, PauliString::single(n, n - 1, Pauli::Z)));
    }
    PauliSumHamiltonian::new(n, terms)
}

/// Symbolic expansion of (H - sI)^2 with duplicate strings merged.
/// The cross terms c_a c_b (P_a P_b + P_b P_a) carry exactly cancelling
/// imaginary phases, so the result stays real to machine precision.
pub fn shift_and_square(h: &PauliSumHamiltonian, s: f64) -> PauliSumHamiltonian {
    let n = h.n_qubits();
    let mut shifted: Vec<PauliTerm> = h.terms().to_vec();
    if s != 0.0 {
        shifted.push(PauliTerm::new(-s, PauliString::identity(n)));
    }
    let shifted = PauliSumHamiltonian::new(n, shifted)
        .expect("shift preserves validity");
    let mut merged: BTreeMap<PauliString, Complex64> = BTreeMap::new();
    for a in shifted.terms() {
        for b in shifted.terms() {
            let (phase, string) = multiply_pauli_strings(&a.string, &b.string)
                .expect("terms share qubit count");
            *merged.entry(string).or_insert(Complex64::ZERO) +=
                a.coefficient * b.coefficient * phase;
        }
    }
    let terms = merged
        .into_iter()
        .map(|(string, coefficient)| PauliTerm { coefficient, string })
        .collect();
    PauliSumHamiltonian::new(n, terms).expect("squared Hermitian operator is Hermitian")
}

/// Parses the line format written by `serialize`: `<coefficient> <string>`
/// per term, `#` comments and blank lines ignored, except that a
/// `# n_qubits=N` directive fixes the qubit count (required if no terms).
/// ASCII and Unicode minus signs are both accepted.
pub fn parse_hamiltonian_file(text: &str) -> Result<PauliSumHamiltonian, HamiltonianError> {
    let mut declared_n: Option<usize> = None;
    let mut terms: Vec<PauliTerm> = Vec::new();
    let mut inferred_n: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n_qubits=") {
                declared_n = Some(value.trim().parse().map_err(|_| {
                    HamiltonianError::ParseError {
                        line: line_no,
                        message: format!("invalid n_qubits value {value:?}"),
                    }
                })?);
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let coeff_text = parts.next().unwrap_or_default().replace('\u{2212}', "-");
        let coefficient: f64 = coeff_text.parse().map_err(|_| {
            HamiltonianError::ParseError {
                line: line_no,
                message: format!("invalid coefficient {coeff_text:?}"),
            }
        })?;
        let string_text = parts.next().ok_or_else(|| HamiltonianError::ParseError {
            line: line_no,
            message: "missing Pauli string".into(),
        })?;
        if parts.next().is_some() {
            return Err(HamiltonianError::ParseError {
                line: line_no,
                message: "trailing fields after Pauli string".into(),
            });
        }
        let string = PauliString::parse(string_text).ok_or_else(|| {
            HamiltonianError::ParseError {
                line: line_no,
                message: format!("invalid Pauli letter in {string_text:?}"),
            }
        })?;
        if let Some(n) = inferred_n {
            if string.len() != n {
                return Err(HamiltonianError::ParseError {
                    line: line_no,
                    message: format!("string length {} != {}", string.len(), n),
                });
            }
        } else {
            inferred_n = Some(string.len());
        }
        terms.push(PauliTerm::new(coefficient, string));
    }
    let n = declared_n.or(inferred_n).ok_or(HamiltonianError::ParseError {
        line: 0,
        message: "no terms and no n_qubits directive".into(),
    })?;
    PauliSumHamiltonian::new(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hermitian_eigendecomposition;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn ps(text: &str) -> PauliString {
        PauliString::parse(text).unwrap()
    }

    fn term_map(h: &PauliSumHamiltonian) -> BTreeMap<String, f64> {
        h.terms().iter().map(|t| (t.string.to_string(), t.coefficient.re)).collect()
    }

    #[test]
    fn multiply_examples() {
        let (phase, r) = multiply_pauli_strings(&ps("X"), &ps("Y")).unwrap();
        assert_eq!(phase, Complex64::I);
        assert_eq!(r, ps("Z"));

        let (phase, r) = multiply_pauli_strings(&ps("Z"), &ps("Z")).unwrap();
        assert_eq!(phase, Complex64::ONE);
        assert_eq!(r, ps("I"));

        let (phase, r) = multiply_pauli_strings(&ps("XZ"), &ps("YI")).unwrap();
        assert_eq!(phase, Complex64::I);
        assert_eq!(r, ps("ZZ"));
    }

    #[test]
    fn multiply_length_mismatch() {
        assert!(matches!(
            multiply_pauli_strings(&ps("X"), &ps("XX")),
            Err(HamiltonianError::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn heisenberg_two_qubit_terms() {
        let h = build_heisenberg_1d(2, 0.5, 0.5, 0.6, 1.0, false).unwrap();
        let map = term_map(&h);
        assert_eq!(map.len(), 4);
        assert!((map["XX"] + 0.25).abs() < 1e-15);
        assert!((map["YY"] + 0.25).abs() < 1e-15);
        assert!((map["ZZ"] + 0.3).abs() < 1e-15);
        assert!((map["ZI"] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_zero_couplings_is_empty() {
        let h = build_heisenberg_1d(2, 0.0, 0.0, 0.0, 0.0, false).unwrap();
        assert!(h.is_zero());
    }

    #[test]
    fn heisenberg_field_on_all_sites() {
        let h = build_heisenberg_1d(2, 0.5, 0.5, 0.6, 1.0, true).unwrap();
        let map = term_map(&h);
        assert!((map["IZ"] + 0.5).abs() < 1e-15);
        assert_eq!(map.len(), 5);
    }

    #[test]
    fn heisenberg_rejects_single_site() {
        assert!(matches!(
            build_heisenberg_1d(1, 0.5, 0.5, 0.6, 1.0, false),
            Err(HamiltonianError::InvalidSize(1))
        ));
    }

    // Frozen spectrum of the 4-qubit chain at Jx=Jy=0.5, Jz=0.6, h=1,
    // field on sites 0..2. All 16 levels are distinct (min gap 0.026).
    #[test]
    fn heisenberg_four_qubit_spectrum() {
        let expected = [
            -2.4, -1.956787, -1.135571, -1.064715, -0.554304, -0.364429, -0.177131,
            0.050804, 0.368649, 0.394616, 0.456787, 0.6, 1.007384, 1.131351, 1.677131,
            1.966216,
        ];
        let h = build_heisenberg_1d(4, 0.5, 0.5, 0.6, 1.0, false).unwrap();
        let eig = hermitian_eigendecomposition(&h.to_dense().unwrap()).unwrap();
        assert_eq!(eig.eigenvalues.len(), 16);
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-5, "got {got}, want {want}");
        }
    }

    #[test]
    fn shift_and_square_single_z() {
        let h = PauliSumHamiltonian::new(1, vec![PauliTerm::new(1.0, ps("Z"))]).unwrap();
        let sq = shift_and_square(&h, 0.5);
        let map = term_map(&sq);
        assert_eq!(map.len(), 2);
        assert!((map["I"] - 1.25).abs() < 1e-15);
        assert!((map["Z"] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_and_square_x_is_identity() {
        let h = PauliSumHamiltonian::new(1, vec![PauliTerm::new(1.0, ps("X"))]).unwrap();
        let sq = shift_and_square(&h, 0.0);
        let map = term_map(&sq);
        assert_eq!(map.len(), 1);
        assert!((map["I"] - 1.0).abs() < 1e-15);
    }

    fn dense_shift_square_error(h: &PauliSumHamiltonian, s: f64) -> f64 {
        let dense = h.to_dense().unwrap();
        let dim = dense.dim();
        let shifted = dense.sub(&ComplexMatrix::identity(dim).scaled(s.into()));
        let direct = shifted.matmul(&shifted);
        let symbolic = shift_and_square(h, s).to_dense().unwrap();
        symbolic.sub(&direct).frobenius_norm()
    }

    #[test]
    fn shift_and_square_matches_dense_heisenberg() {
        let h = build_heisenberg_1d(2, 0.5, 0.5, 0.6, 1.0, false).unwrap();
        assert!(dense_shift_square_error(&h, 0.2) < 1e-10);
    }

    #[test]
    fn shift_and_square_is_positive_semidefinite() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..10 {
            let n = 2 + rng.index(2);
            let n_terms = 1 + rng.index(6);
            let terms: Vec<PauliTerm> = (0..n_terms)
                .map(|_| {
                    let paulis: Vec<Pauli> = (0..n)
                        .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.index(4)])
                        .collect();
                    PauliTerm::new(rng.uniform(-1.0, 1.0), PauliString::new(paulis))
                })
                .collect();
            let h = PauliSumHamiltonian::new(n, terms).unwrap();
            let s = rng.uniform(-2.0, 2.0);
            let sq = shift_and_square(&h, s);
            let eig = hermitian_eigendecomposition(&sq.to_dense().unwrap()).unwrap();
            assert!(eig.eigenvalues.iter().all(|&x| x >= -1e-10));
        }
    }

    #[test]
    fn to_dense_single_z() {
        let h = PauliSumHamiltonian::new(1, vec![PauliTerm::new(1.0, ps("Z"))]).unwrap();
        let m = h.to_dense().unwrap();
        assert_eq!(m.get(0, 0), Complex64::ONE);
        assert_eq!(m.get(1, 1), -Complex64::ONE);
        assert_eq!(m.get(0, 1), Complex64::ZERO);
    }

    // "XI" puts X on qubit 0, which is bit 0 of the index: |00> <-> |01>.
    #[test]
    fn to_dense_little_endian_convention() {
        let h = PauliSumHamiltonian::new(2, vec![PauliTerm::new(1.0, ps("XI"))]).unwrap();
        let m = h.to_dense().unwrap();
        assert_eq!(m.get(1, 0), Complex64::ONE);
        assert_eq!(m.get(0, 1), Complex64::ONE);
        assert_eq!(m.get(3, 2), Complex64::ONE);
        assert_eq!(m.get(2, 0), Complex64::ZERO);
    }

    #[test]
    fn to_dense_rejects_large_systems() {
        let h = PauliSumHamiltonian::new(
            14,
            vec![PauliTerm::new(1.0, PauliString::identity(14))],
        )
        .unwrap();
        assert!(matches!(h.to_dense(), Err(HamiltonianError::TooLarge(14))));
    }

    #[test]
    fn parse_heisenberg_encoding() {
        let text = "-0.25 XX\n-0.25 YY\n-0.3 ZZ\n-0.5 ZI";
        let parsed = parse_hamiltonian_file(text).unwrap();
        let built = build_heisenberg_1d(2, 0.5, 0.5, 0.6, 1.0, false).unwrap();
        assert_eq!(term_map(&parsed), term_map(&built));
    }

    #[test]
    fn parse_merges_duplicates() {
        let h = parse_hamiltonian_file("1.0 XX\n1.0 XX").unwrap();
        assert_eq!(h.terms().len(), 1);
        assert!((h.terms()[0].coefficient.re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn parse_rejects_invalid_letter() {
        match parse_hamiltonian_file("1.0 XQ") {
            Err(HamiltonianError::ParseError { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_accepts_unicode_minus_and_comments() {
        let text = "# a comment\n\n\u{2212}0.5 ZI\n";
        let h = parse_hamiltonian_file(text).unwrap();
        assert!((h.terms()[0].coefficient.re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn serialize_round_trips_exactly() {
        let h = build_heisenberg_1d(3, 0.5, 0.5, 0.6, 1.0, false).unwrap();
        let text = h.serialize();
        let reparsed = parse_hamiltonian_file(&text).unwrap();
        assert_eq!(h, reparsed);
        assert_eq!(text, reparsed.serialize());
        let sq = shift_and_square(&h, 0.37);
        let reparsed_sq = parse_hamiltonian_file(&sq.serialize()).unwrap();
        assert_eq!(sq, reparsed_sq);
    }

    #[test]
    fn serialize_round_trips_empty_operator() {
        let h = build_heisenberg_1d(2, 0.0, 0.0, 0.0, 0.0, false).unwrap();
        let reparsed = parse_hamiltonian_file(&h.serialize()).unwrap();
        assert_eq!(reparsed.n_qubits(), 2);
        assert!(reparsed.is_zero());
    }

    fn arb_pauli() -> impl Strategy<Value = Pauli> {
        prop_oneof![
            Just(Pauli::I),
            Just(Pauli::X),
            Just(Pauli::Y),
            Just(Pauli::Z)
        ]
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        prop::collection::vec(arb_pauli(), n).prop_map(PauliString::new)
    }

    proptest! {
        #[test]
        fn string_squares_to_identity(s in (1usize..6).prop_flat_map(arb_string)) {
            let (phase, r) = multiply_pauli_strings(&s, &s).unwrap();
            prop_assert_eq!(phase, Complex64::ONE);
            prop_assert_eq!(r, PauliString::identity(s.len()));
        }

        #[test]
        fn string_product_is_associative(
            (a, b, c) in (1usize..5).prop_flat_map(|n| (arb_string(n), arb_string(n), arb_string(n)))
        ) {
            let (p_ab, ab) = multiply_pauli_strings(&a, &b).unwrap();
            let (p_ab_c, ab_c) = multiply_pauli_strings(&ab, &c).unwrap();
            let (p_bc, bc) = multiply_pauli_strings(&b, &c).unwrap();
            let (p_a_bc, a_bc) = multiply_pauli_strings(&a, &bc).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert!((p_ab * p_ab_c - p_bc * p_a_bc).norm() < 1e-15);
        }

        #[test]
        fn symbolic_square_matches_dense(
            terms in prop::collection::vec(
                (prop::collection::vec(arb_pauli(), 3), -1.0f64..1.0),
                1..6
            ),
            s in -2.0f64..2.0,
        ) {
            let terms: Vec<PauliTerm> = terms
                .into_iter()
                .map(|(p, c)| PauliTerm::new(c, PauliString::new(p)))
                .collect();
            let h = PauliSumHamiltonian::new(3, terms).unwrap();
            prop_assert!(dense_shift_square_error(&h, s) <= 1e-10);
        }
    }
}
