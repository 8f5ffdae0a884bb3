//! Frequent operator n-grams ("building blocks") mined from pipeline
//! corpora, and the vocabulary files that store them.
//!
//! A vocabulary file holds one block per line: kind tokens joined by
//! ` -> ` in data-flow order, optionally followed by a tab and a count.
//! Blank lines and lines starting with `#` are ignored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::evolution::ParetoArchive;
use crate::pipeline::{extract_chains, PipelineTree};
use crate::primitives::{OperatorKind, COMBINE_TOKEN};

/// Longest chain a block may hold.
pub const MAX_BLOCK_LEN: usize = 4;

/// The vocabulary shipped with the crate.
pub const DEFAULT_VOCABULARY: &str = include_str!("../data/default_blocks.txt");

const ARROW: &str = "->";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockError {
    #[error("n-gram length {0} not in [1, 4]")]
    BadMaxN(usize),
    #[error("block length {0} not in [1, 4]")]
    BadLength(usize),
    #[error("duplicate block `{0}`")]
    Duplicate(String),
    #[error("line {line}: unknown operator token `{token}`")]
    UnknownToken { line: usize, token: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("vocabulary is empty")]
    Empty,
    #[error("no archives to mine")]
    NoArchives,
    #[error("archive {0} is empty")]
    EmptyArchive(usize),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildingBlock {
    chain: Vec<OperatorKind>,
    count: u64,
}

impl BuildingBlock {
    pub fn new(chain: Vec<OperatorKind>, count: u64) -> Result<Self, BlockError> {
        if chain.is_empty() || chain.len() > MAX_BLOCK_LEN {
            return Err(BlockError::BadLength(chain.len()));
        }
        Ok(Self { chain, count })
    }

    pub fn chain(&self) -> &[OperatorKind] {
        &self.chain
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

fn chain_text(chain: &[OperatorKind]) -> String {
    chain.iter().map(|k| k.name()).collect::<Vec<_>>().join(" -> ")
}

fn chain_order(a: &[OperatorKind], b: &[OperatorKind]) -> Ordering {
    a.iter().map(|k| k.name()).cmp(b.iter().map(|k| k.name()))
}

fn rank(a: &BuildingBlock, b: &BuildingBlock) -> Ordering {
    b.count.cmp(&a.count).then_with(|| chain_order(&a.chain, &b.chain))
}

/// Blocks ordered by count (descending), ties by chain tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockVocabulary {
    blocks: Vec<BuildingBlock>,
}

impl BlockVocabulary {
    /// Sorts `blocks` into canonical order; rejects repeated chains.
    pub fn new(mut blocks: Vec<BuildingBlock>) -> Result<Self, BlockError> {
        blocks.sort_by(rank);
        let mut seen = std::collections::HashSet::new();
        for b in &blocks {
            if !seen.insert(b.chain.clone()) {
                return Err(BlockError::Duplicate(chain_text(&b.chain)));
            }
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[BuildingBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The vocabulary in [`DEFAULT_VOCABULARY`].
    pub fn default_blocks() -> Self {
        parse_vocabulary(DEFAULT_VOCABULARY).expect("shipped vocabulary parses")
    }

    /// File form; [`parse_vocabulary`] reads it back.
    pub fn to_text(&self) -> String {
        self.blocks
            .iter()
            .map(|b| format!("{}\t{}\n", chain_text(&b.chain), b.count))
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), BlockError> {
        std::fs::write(path.as_ref(), self.to_text())
            .map_err(|e| BlockError::Io(format!("{}: {e}", path.as_ref().display())))
    }
}

/// Counts every contiguous n-gram (1 ≤ n ≤ `max_n`) of every leaf-to-root
/// chain in the corpus.
pub fn count_ngrams(corpus: &[PipelineTree], max_n: usize) -> Result<BTreeMap<Vec<OperatorKind>, u64>, BlockError> {
    if !(1..=MAX_BLOCK_LEN).contains(&max_n) {
        return Err(BlockError::BadMaxN(max_n));
    }
    let mut counts = BTreeMap::new();
    for tree in corpus {
        for chain in extract_chains(tree) {
            for n in 1..=max_n.min(chain.len()) {
                for window in chain.windows(n) {
                    *counts.entry(window.to_vec()).or_insert(0) += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Adds `other` into `into`. Order of merging does not matter.
pub fn merge_counts(into: &mut BTreeMap<Vec<OperatorKind>, u64>, other: &BTreeMap<Vec<OperatorKind>, u64>) {
    for (chain, n) in other {
        *into.entry(chain.clone()).or_insert(0) += n;
    }
}

/// The `k` most frequent chains.
pub fn top_k(counts: &BTreeMap<Vec<OperatorKind>, u64>, k: usize) -> Result<BlockVocabulary, BlockError> {
    let blocks = counts
        .iter()
        .map(|(chain, &n)| BuildingBlock::new(chain.clone(), n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut vocab = BlockVocabulary::new(blocks)?;
    vocab.blocks.truncate(k);
    Ok(vocab)
}

/// Mines the best pipeline of each archive (highest accuracy, then fewest
/// operators).
pub fn mine_from_runs(archives: &[ParetoArchive], max_n: usize, k: usize) -> Result<BlockVocabulary, BlockError> {
    if archives.is_empty() {
        return Err(BlockError::NoArchives);
    }
    let best = archives
        .iter()
        .enumerate()
        .map(|(i, a)| a.best().map(|m| m.individual.tree().clone()).ok_or(BlockError::EmptyArchive(i)))
        .collect::<Result<Vec<_>, _>>()?;
    top_k(&count_ngrams(&best, max_n)?, k)
}

pub fn parse_vocabulary(text: &str) -> Result<BlockVocabulary, BlockError> {
    let mut blocks = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (chain_part, count) = match trimmed.split_once('\t') {
            Some((c, n)) => {
                let n = n.trim().parse::<u64>().map_err(|_| BlockError::Malformed {
                    line,
                    message: format!("bad count `{}`", n.trim()),
                })?;
                (c, n)
            }
            None => (trimmed, 0),
        };
        let mut chain = Vec::new();
        for token in chain_part.split(ARROW).map(str::trim) {
            if token.is_empty() {
                return Err(BlockError::Malformed { line, message: "empty token".into() });
            }
            let kind = match OperatorKind::from_token(token) {
                Some(kind) if token != COMBINE_TOKEN => kind,
                _ => return Err(BlockError::UnknownToken { line, token: token.to_string() }),
            };
            chain.push(kind);
        }
        let block = BuildingBlock::new(chain, count).map_err(|e| BlockError::Malformed { line, message: e.to_string() })?;
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Err(BlockError::Empty);
    }
    BlockVocabulary::new(blocks)
}

pub fn load_vocabulary(path: impl AsRef<Path>) -> Result<BlockVocabulary, BlockError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| BlockError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_vocabulary(&text)
}
