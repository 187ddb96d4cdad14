//! Event regex dialect.
//!
//! Tokens are event names `[A-Za-z_][A-Za-z0-9_]*` separated by whitespace or
//! operators. Operators are `|`, postfix `*`, `+`, `?` and parentheses;
//! juxtaposition is concatenation. The empty pattern denotes ε.

use crate::automata::{Alphabet, Nfa, StateId, SymbolId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Epsilon,
    Symbol(SymbolId),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Optional(Box<Regex>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bar,
    Star,
    Plus,
    Question,
    Open,
    Close,
}

fn tokenize(pattern: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let bytes = pattern.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'|' => Token::Bar,
            b'*' => Token::Star,
            b'+' => Token::Plus,
            b'?' => Token::Question,
            b'(' => Token::Open,
            b')' => Token::Close,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(pattern[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = pattern[i..].chars().next().unwrap_or('?');
                return Err(Error::RegexParse { position: i, message: format!("unexpected character `{ch}`") });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn alternation(&mut self) -> Result<Regex> {
        let mut branches = vec![self.concatenation()?];
        while self.peek() == Some(&Token::Bar) {
            self.pos += 1;
            branches.push(self.concatenation()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Regex::Alt(branches) })
    }

    fn concatenation(&mut self) -> Result<Regex> {
        let mut parts = Vec::new();
        while let Some(tok) = self.peek() {
            match tok {
                Token::Bar | Token::Close => break,
                _ => parts.push(self.postfix()?),
            }
        }
        Ok(match parts.len() {
            0 => Regex::Epsilon,
            1 => parts.pop().unwrap(),
            _ => Regex::Concat(parts),
        })
    }

    fn postfix(&mut self) -> Result<Regex> {
        let mut re = self.atom()?;
        loop {
            re = match self.peek() {
                Some(Token::Star) => Regex::Star(Box::new(re)),
                Some(Token::Plus) => Regex::Plus(Box::new(re)),
                Some(Token::Question) => Regex::Optional(Box::new(re)),
                _ => return Ok(re),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Regex> {
        let position = self.offset();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match self.alphabet.id(&name) {
                    Some(id) => Ok(Regex::Symbol(id)),
                    None => Err(Error::RegexParse { position, message: format!("unknown event `{name}`") }),
                }
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.alternation()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(Error::RegexParse { position: self.offset(), message: "expected `)`".into() });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(tok) => Err(Error::RegexParse { position, message: format!("unexpected `{}`", token_text(&tok)) }),
            None => Err(Error::RegexParse { position, message: "unexpected end of pattern".into() }),
        }
    }
}

fn token_text(tok: &Token) -> &str {
    match tok {
        Token::Ident(s) => s,
        Token::Bar => "|",
        Token::Star => "*",
        Token::Plus => "+",
        Token::Question => "?",
        Token::Open => "(",
        Token::Close => ")",
    }
}

pub fn parse_regex(pattern: &str, alphabet: &Alphabet) -> Result<Regex> {
    let tokens = tokenize(pattern)?;
    let mut parser = Parser { tokens, pos: 0, end: pattern.len(), alphabet };
    let re = parser.alternation()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::RegexParse { position: parser.offset(), message: "unbalanced `)`".into() });
    }
    Ok(re)
}

/// Thompson automaton with ε-edges, used only during compilation.
struct EpsNfa {
    eps: Vec<Vec<StateId>>,
    edges: Vec<Vec<(SymbolId, StateId)>>,
}

impl EpsNfa {
    fn state(&mut self) -> StateId {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    /// Returns (start, accept) of a fragment for `re`.
    fn build(&mut self, re: &Regex) -> (StateId, StateId) {
        match re {
            Regex::Epsilon => {
                let s = self.state();
                let t = self.state();
                self.eps[s].push(t);
                (s, t)
            }
            Regex::Symbol(a) => {
                let s = self.state();
                let t = self.state();
                self.edges[s].push((*a, t));
                (s, t)
            }
            Regex::Concat(parts) => {
                let mut frags = parts.iter().map(|p| self.build(p)).collect::<Vec<_>>().into_iter();
                let (start, mut end) = frags.next().expect("concatenation is non-empty");
                for (s, t) in frags {
                    self.eps[end].push(s);
                    end = t;
                }
                (start, end)
            }
            Regex::Alt(branches) => {
                let s = self.state();
                let t = self.state();
                for b in branches {
                    let (bs, bt) = self.build(b);
                    self.eps[s].push(bs);
                    self.eps[bt].push(t);
                }
                (s, t)
            }
            Regex::Star(inner) | Regex::Plus(inner) | Regex::Optional(inner) => {
                let s = self.state();
                let t = self.state();
                let (is, it) = self.build(inner);
                self.eps[s].push(is);
                self.eps[it].push(t);
                if !matches!(re, Regex::Plus(_)) {
                    self.eps[s].push(t);
                }
                if !matches!(re, Regex::Optional(_)) {
                    self.eps[it].push(is);
                }
                (s, t)
            }
        }
    }

    fn closure(&self, q: StateId) -> Vec<StateId> {
        let mut seen = vec![false; self.eps.len()];
        let mut stack = vec![q];
        seen[q] = true;
        let mut out = Vec::new();
        while let Some(p) = stack.pop() {
            out.push(p);
            for &r in &self.eps[p] {
                if !seen[r] {
                    seen[r] = true;
                    stack.push(r);
                }
            }
        }
        out
    }
}

/// Compiles a regex into an ε-free NFA (without an error state) accepting
/// exactly its language.
pub fn compile_regex(pattern: &str, alphabet: &Alphabet) -> Result<Nfa> {
    let re = parse_regex(pattern, alphabet)?;
    Ok(regex_to_nfa(&re, alphabet))
}

pub fn regex_to_nfa(re: &Regex, alphabet: &Alphabet) -> Nfa {
    let mut eps = EpsNfa { eps: Vec::new(), edges: Vec::new() };
    let (start, accept) = eps.build(re);
    let n = eps.eps.len();
    let mut nfa = Nfa::new(alphabet.clone(), n, start);
    for q in 0..n {
        let closure = eps.closure(q);
        if closure.contains(&accept) {
            nfa.set_accepting(q, true);
        }
        for &p in &closure {
            for &(a, t) in &eps.edges[p] {
                nfa.add_transition(q, a, t);
            }
        }
    }
    nfa.trim()
}
