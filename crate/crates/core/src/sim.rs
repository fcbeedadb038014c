//! Dense statevector simulation of feature-map circuits.
//!
//! A feature map is a Hadamard layer on `|0…0⟩` followed by a chain of
//! Pauli-word rotations `R_P(θ) = exp(−iθ/2·P)`. Rotations are applied
//! directly to the amplitudes through `R_P(θ) = cos(θ/2)·Id − i·sin(θ/2)·P`.
//!
//! Basis ordering is little-endian: qubit `q` is bit `q` of the amplitude
//! index, and letter `q` of a word (reading left to right) acts on qubit `q`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqsError};

pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// An n-qubit Pauli string with at least one non-identity letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliWord {
    letters: Vec<Pauli>,
}

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        check_qubits(letters.len())?;
        if letters.iter().all(|&p| p == Pauli::I) {
            return Err(SqsError::Usage(
                "all-identity Pauli word only contributes a global phase".into(),
            ));
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Bit mask of qubits flipped by the word (X or Y).
    fn flip_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (q, _)| m | (1 << q))
    }

    /// Bit mask of qubits picking up a `(−1)^bit` sign (Z or Y).
    fn sign_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| matches!(p, Pauli::Z | Pauli::Y))
            .fold(0, |m, (q, _)| m | (1 << q))
    }

    fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count()
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = SqsError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| SqsError::Usage(format!("invalid Pauli letter {c:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliWord::new(letters)
    }
}

impl TryFrom<String> for PauliWord {
    type Error = SqsError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliWord> for String {
    fn from(w: PauliWord) -> String {
        w.to_string()
    }
}

/// One gene of an individual: a Pauli word and its trainable angle scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gene {
    pub word: PauliWord,
    pub alpha: f64,
}

impl Gene {
    pub fn new(word: PauliWord, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(SqsError::Numeric(format!("gene alpha must be finite, got {alpha}")));
        }
        Ok(Self { word, alpha })
    }

    pub fn parse(word: &str, alpha: f64) -> Result<Self> {
        Gene::new(word.parse()?, alpha)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeatureMap {
    qubits: usize,
    genes: Vec<Gene>,
}

/// An ordered chain of genes defining the encoding unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFeatureMap")]
pub struct FeatureMap {
    qubits: usize,
    genes: Vec<Gene>,
}

impl TryFrom<RawFeatureMap> for FeatureMap {
    type Error = SqsError;

    fn try_from(raw: RawFeatureMap) -> Result<Self> {
        FeatureMap::new(raw.qubits, raw.genes)
    }
}

impl FeatureMap {
    pub fn new(qubits: usize, genes: Vec<Gene>) -> Result<Self> {
        check_qubits(qubits)?;
        if genes.is_empty() {
            return Err(SqsError::Usage("feature map needs at least one gene".into()));
        }
        for g in &genes {
            if g.word.len() != qubits {
                return Err(SqsError::Dimension { expected: qubits, got: g.word.len() });
            }
            if !g.alpha.is_finite() {
                return Err(SqsError::Numeric(format!("gene alpha must be finite, got {}", g.alpha)));
            }
        }
        Ok(Self { qubits, genes })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.genes.iter().map(|g| g.alpha).collect()
    }

    /// Same words, new scaling coefficients.
    pub fn with_alphas(&self, alphas: &[f64]) -> Result<Self> {
        if alphas.len() != self.genes.len() {
            return Err(SqsError::Dimension { expected: self.genes.len(), got: alphas.len() });
        }
        let genes = self
            .genes
            .iter()
            .zip(alphas)
            .map(|(g, &a)| Gene::new(g.word.clone(), a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { qubits: self.qubits, genes })
    }

    /// Genes whose word touches two or more qubits.
    pub fn entangling_blocks(&self) -> usize {
        self.genes.iter().filter(|g| g.word.weight() >= 2).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("feature map serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(SqsError::Config(format!("qubit count must be in 1..={MAX_QUBITS}, got {n}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(SqsError::Usage(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let qubits = amps.len().trailing_zeros() as usize;
        check_qubits(qubits)?;
        Ok(Self { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(SqsError::Dimension { expected: self.amps.len(), got: other.amps.len() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn hadamard_layer(&mut self) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for q in 0..self.qubits {
            let bit = 1usize << q;
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    let a = self.amps[i];
                    let b = self.amps[i | bit];
                    self.amps[i] = (a + b) * s;
                    self.amps[i | bit] = (a - b) * s;
                }
            }
        }
    }

    /// In-place `exp(−iθ/2·P)`.
    pub fn rotate(&mut self, word: &PauliWord, theta: f64) -> Result<()> {
        if word.len() != self.qubits {
            return Err(SqsError::Dimension { expected: self.qubits, got: word.len() });
        }
        if theta == 0.0 {
            return Ok(());
        }
        let (s, c) = (theta / 2.0).sin_cos();
        let flip = word.flip_mask();
        let sign = word.sign_mask();
        // i^{#Y}
        let y_phase = match word.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        // −i·sin(θ/2)·i^{#Y}; the per-index sign is applied below.
        let coupling = Complex64::new(0.0, -s) * y_phase;
        let parity = |k: usize| if (k & sign).count_ones() % 2 == 0 { 1.0 } else { -1.0 };

        if flip == 0 {
            for (k, a) in self.amps.iter_mut().enumerate() {
                *a *= c + coupling * parity(k);
            }
        } else {
            for k in 0..self.amps.len() {
                let partner = k ^ flip;
                if k < partner {
                    let a = self.amps[k];
                    let b = self.amps[partner];
                    // P|k⟩ = phase(k)|k⊕flip⟩
                    self.amps[k] = a * c + coupling * parity(partner) * b;
                    self.amps[partner] = b * c + coupling * parity(k) * a;
                }
            }
        }
        Ok(())
    }
}

pub fn init_zero_state(qubits: usize) -> Result<StateVector> {
    check_qubits(qubits)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { qubits, amps })
}

pub fn apply_hadamard_layer(mut state: StateVector) -> StateVector {
    state.hadamard_layer();
    state
}

pub fn apply_pauli_rotation(mut state: StateVector, word: &PauliWord, theta: f64) -> Result<StateVector> {
    state.rotate(word, theta)?;
    Ok(state)
}

/// Product rule: `α · Π x[q]` over the word's non-identity positions.
pub fn angle_for_gene(gene: &Gene, x: &[f64]) -> Result<f64> {
    if x.len() != gene.word.len() {
        return Err(SqsError::Dimension { expected: gene.word.len(), got: x.len() });
    }
    Ok(gene
        .word
        .letters()
        .iter()
        .zip(x)
        .filter(|(&p, _)| p != Pauli::I)
        .fold(gene.alpha, |acc, (_, &v)| acc * v))
}

/// `|φ(x)⟩ = U_M(x)·H^{⊗n}|0…0⟩` with genes applied in chain order.
pub fn encode(fm: &FeatureMap, x: &[f64]) -> Result<StateVector> {
    if x.len() != fm.qubits {
        return Err(SqsError::Dimension { expected: fm.qubits, got: x.len() });
    }
    let mut state = init_zero_state(fm.qubits)?;
    state.hadamard_layer();
    for gene in &fm.genes {
        state.rotate(&gene.word, angle_for_gene(gene, x)?)?;
    }
    Ok(state)
}

/// Applies `H^{⊗n}·U_M(x)†` to `state`, i.e. the inverse of the encoding circuit.
pub fn apply_inverse_encoding(state: &mut StateVector, fm: &FeatureMap, x: &[f64]) -> Result<()> {
    if x.len() != fm.qubits {
        return Err(SqsError::Dimension { expected: fm.qubits, got: x.len() });
    }
    for gene in fm.genes.iter().rev() {
        state.rotate(&gene.word, -angle_for_gene(gene, x)?)?;
    }
    state.hadamard_layer();
    Ok(())
}
