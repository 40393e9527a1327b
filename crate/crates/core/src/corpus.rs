//! Golden text dumps of `O_1..O_n` and the comparison against the engine.
//!
//! A corpus directory holds a `MANIFEST` (`model: <id>`, `orders: <n>`) and
//! one file `O<k>.txt` per order in the [`crate::opalg::text`] format.

use std::fs;
use std::path::Path;

use crate::models::{Hamiltonian, PotentialModel, MASS};
use crate::opalg::text::parse_expr;
use crate::opalg::{rat, Axis, Bindings, Coefficient, OperatorExpr, HBAR, LIGHT_SPEED};
use crate::series::ScatteringOperatorSequence;
use crate::{Error, Result};

const MORSE: [&str; 6] = [
    include_str!("../corpus/morse_appendix/O1.txt"),
    include_str!("../corpus/morse_appendix/O2.txt"),
    include_str!("../corpus/morse_appendix/O3.txt"),
    include_str!("../corpus/morse_appendix/O4.txt"),
    include_str!("../corpus/morse_appendix/O5.txt"),
    include_str!("../corpus/morse_appendix/O6.txt"),
];

const BOX: [&str; 6] = [
    include_str!("../corpus/constant_box/O1.txt"),
    include_str!("../corpus/constant_box/O2.txt"),
    include_str!("../corpus/constant_box/O3.txt"),
    include_str!("../corpus/constant_box/O4.txt"),
    include_str!("../corpus/constant_box/O5.txt"),
    include_str!("../corpus/constant_box/O6.txt"),
];

pub const BUILTIN: [&str; 2] = ["morse_appendix", "constant_box"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusModel {
    /// Morse `(V0, a, x0) = (1, 1/3, 0)` with `m = hbar = c = 1`.
    MorseAppendix,
    /// Unit box with `m = hbar = c = 1`.
    ConstantBox,
}

impl CorpusModel {
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "morse_appendix" => Ok(CorpusModel::MorseAppendix),
            "constant_box" => Ok(CorpusModel::ConstantBox),
            _ => Err(Error::Corpus(format!("unknown corpus model `{id}`"))),
        }
    }

    /// Hamiltonian with symbolic `V0`, `m`, `hbar`, `c`.
    pub fn hamiltonian(self) -> Result<Hamiltonian> {
        let model = match self {
            CorpusModel::MorseAppendix => PotentialModel::Morse {
                depth: Coefficient::param("V0"),
                width: rat(1, 3),
                equilibrium: rat(0, 1),
                transverse: "unspecified".into(),
            },
            CorpusModel::ConstantBox => PotentialModel::ConstantBox { size: [rat(1, 1), rat(1, 1), rat(1, 1)] },
        };
        Hamiltonian::with_symbolic_mass(model)
    }

    pub fn bindings(self) -> Bindings {
        [("V0", rat(1, 1)), (MASS, rat(1, 1)), (HBAR, rat(1, 1)), (LIGHT_SPEED, rat(1, 1))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub id: String,
    pub model: CorpusModel,
    pub orders: Vec<OperatorExpr>,
}

pub fn builtin(id: &str) -> Result<Corpus> {
    let (model, texts) = match id {
        "morse_appendix" => (CorpusModel::MorseAppendix, MORSE),
        "constant_box" => (CorpusModel::ConstantBox, BOX),
        _ => return Err(Error::Corpus(format!("no built-in corpus `{id}`"))),
    };
    let orders = texts.iter().map(|t| parse_expr(t)).collect::<Result<Vec<_>>>()?;
    Ok(Corpus { id: id.to_string(), model, orders })
}

pub fn load_dir(dir: &Path) -> Result<Corpus> {
    let read = |name: &str| {
        fs::read_to_string(dir.join(name))
            .map_err(|e| Error::Corpus(format!("{}: {e}", dir.join(name).display())))
    };
    let manifest = read("MANIFEST")?;
    let mut model = None;
    let mut count = None;
    for line in manifest.lines() {
        match line.split_once(':') {
            Some(("model", v)) => model = Some(CorpusModel::from_id(v.trim())?),
            Some(("orders", v)) => {
                count = Some(v.trim().parse::<usize>().map_err(|_| Error::Corpus(format!("bad order count `{v}`")))?)
            }
            _ if line.trim().is_empty() => {}
            _ => return Err(Error::Corpus(format!("bad manifest line `{line}`"))),
        }
    }
    let model = model.ok_or_else(|| Error::Corpus("manifest lacks `model`".into()))?;
    let count = count.ok_or_else(|| Error::Corpus("manifest lacks `orders`".into()))?;
    let orders = (1..=count)
        .map(|k| parse_expr(&read(&format!("O{k}.txt"))?))
        .collect::<Result<Vec<_>>>()?;
    let id = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Corpus { id, model, orders })
}

/// Built-in id or corpus directory.
pub fn resolve(id_or_path: &str) -> Result<Corpus> {
    if BUILTIN.contains(&id_or_path) {
        builtin(id_or_path)
    } else {
        let p = Path::new(id_or_path);
        if p.is_dir() {
            load_dir(p)
        } else {
            Err(Error::Corpus(format!("`{id_or_path}` is neither a built-in corpus nor a directory")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrderResult {
    pub order: usize,
    pub pass: bool,
    pub expected_terms: usize,
    pub computed_terms: usize,
}

#[derive(Clone, Debug)]
pub struct GoldenReport {
    pub id: String,
    pub orders: Vec<OrderResult>,
}

impl GoldenReport {
    pub fn passed(&self) -> usize {
        self.orders.iter().filter(|o| o.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.orders.len()
    }
}

/// Computes `O_k` with symbolic parameters, binds the corpus units and
/// compares each order exactly.
pub fn run_golden(corpus: &Corpus) -> Result<GoldenReport> {
    let h = corpus.model.hamiltonian()?;
    let b = corpus.model.bindings();
    let mut seq = ScatteringOperatorSequence::along(&h, Axis::X)?;
    let mut orders = Vec::new();
    for (k, expected) in corpus.orders.iter().enumerate() {
        let computed = seq.order(k + 1).substitute_parameters(&b)?;
        let expected = expected.canonicalize().substitute_parameters(&b)?;
        orders.push(OrderResult {
            order: k + 1,
            pass: computed.equal(&expected),
            expected_terms: expected.len(),
            computed_terms: computed.len(),
        });
    }
    Ok(GoldenReport { id: corpus.id.clone(), orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_corpora_parse() {
        for id in BUILTIN {
            assert_eq!(builtin(id).unwrap().orders.len(), 6);
        }
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn constant_box_corpus_passes() {
        let r = run_golden(&builtin("constant_box").unwrap()).unwrap();
        assert!(r.all_pass());
    }
}
