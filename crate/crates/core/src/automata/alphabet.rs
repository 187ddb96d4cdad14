use std::collections::HashMap;
use std::fmt;

use crate::automata::SymbolId;
use crate::{Error, Result};

/// Ordered set of symbol names. Symbol ids are positions in this order.
#[derive(Clone, Default)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, SymbolId>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for s in symbols {
            alphabet.push(s)?;
        }
        Ok(alphabet)
    }

    pub fn push(&mut self, symbol: impl Into<String>) -> Result<SymbolId> {
        let symbol = symbol.into();
        if self.index.contains_key(&symbol) {
            return Err(Error::DuplicateSymbol(symbol));
        }
        let id = self.symbols.len();
        self.index.insert(symbol.clone(), id);
        self.symbols.push(symbol);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id]
    }

    pub fn id(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<SymbolId> {
        self.id(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    pub fn ids(&self) -> std::ops::Range<SymbolId> {
        0..self.symbols.len()
    }

    /// Maps each name to its id.
    pub fn encode<I, S>(&self, word: I) -> Result<Vec<SymbolId>>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        word.into_iter().map(|s| self.require(s.as_ref())).collect()
    }

    /// Splits on whitespace and encodes each token.
    pub fn encode_tokens(&self, text: &str) -> Result<Vec<SymbolId>> {
        self.encode(text.split_whitespace())
    }

    pub fn decode(&self, word: &[SymbolId]) -> Vec<&str> {
        word.iter().map(|&a| self.name(a)).collect()
    }

    pub fn check_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.symbols.clone(),
                right: other.symbols.clone(),
            })
        }
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.symbols).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        assert!(matches!(Alphabet::new(["a", "b", "a"]), Err(Error::DuplicateSymbol(s)) if s == "a"));
    }

    #[test]
    fn encodes_tokens() {
        let sigma = Alphabet::new(["c", "n", "u"]).unwrap();
        assert_eq!(sigma.encode_tokens(" c n\nu ").unwrap(), vec![0, 1, 2]);
        assert!(matches!(sigma.encode_tokens("c x"), Err(Error::UnknownSymbol(s)) if s == "x"));
    }
}
