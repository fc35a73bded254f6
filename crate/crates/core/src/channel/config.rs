//! Antenna configurations `[∏(N_k, M_k)]` and their bracket notation.
//!
//! The textual form lists one `(N,M)` pair per user, separated by dots:
//! `[(2,3).(2,4).(3,5).(3,2).(4,2)]`. A pair may carry a repetition suffix,
//! so the homogeneous setting `[(2,2).(2,2).(2,2)]` can be written `[(2,2)^3]`.
//! Whitespace is ignored everywhere.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported user count. Node sets are stored as `u32` bitmasks.
pub const MAX_USERS: usize = 32;

/// Per-user receive/transmit antenna counts.
///
/// User `k` (0-based) has `rx[k]` receive antennas (`N_k`) at its receiver and
/// `tx[k]` transmit antennas (`M_k`) at its transmitter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AntennaConfig {
    rx: Vec<usize>,
    tx: Vec<usize>,
}

impl AntennaConfig {
    pub fn new(rx: Vec<usize>, tx: Vec<usize>) -> Result<Self> {
        if rx.len() != tx.len() {
            return Err(Error::InvalidConfig(format!(
                "{} receive counts but {} transmit counts",
                rx.len(),
                tx.len()
            )));
        }
        if rx.is_empty() {
            return Err(Error::InvalidConfig("at least one user is required".into()));
        }
        if rx.len() > MAX_USERS {
            return Err(Error::InvalidConfig(format!(
                "{} users exceeds the supported maximum of {MAX_USERS}",
                rx.len()
            )));
        }
        if let Some(k) = rx.iter().chain(tx.iter()).position(|&c| c == 0) {
            let user = k % rx.len() + 1;
            return Err(Error::InvalidConfig(format!("user {user} has a zero antenna count")));
        }
        Ok(Self { rx, tx })
    }

    /// Builds a configuration from `(N_k, M_k)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let (rx, tx) = pairs.iter().copied().unzip();
        Self::new(rx, tx)
    }

    /// The homogeneous `[(N,M)^K]` setting.
    pub fn homogeneous(n: usize, m: usize, users: usize) -> Result<Self> {
        Self::new(vec![n; users], vec![m; users])
    }

    /// Number of users `K`.
    pub fn users(&self) -> usize {
        self.rx.len()
    }

    pub fn rx_antennas(&self) -> &[usize] {
        &self.rx
    }

    pub fn tx_antennas(&self) -> &[usize] {
        &self.tx
    }

    /// `N_Tot`.
    pub fn total_rx(&self) -> usize {
        self.rx.iter().sum()
    }

    /// `M_Tot`.
    pub fn total_tx(&self) -> usize {
        self.tx.iter().sum()
    }

    /// `Σ (N_k + M_k)`.
    pub fn total_antennas(&self) -> usize {
        self.total_rx() + self.total_tx()
    }

    /// Row offset of receiver `i` in the global channel matrix.
    pub fn rx_offset(&self, i: usize) -> usize {
        self.rx[..i].iter().sum()
    }

    /// Column offset of transmitter `j` in the global channel matrix.
    pub fn tx_offset(&self, j: usize) -> usize {
        self.tx[..j].iter().sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rx.iter().copied().zip(self.tx.iter().copied())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.pairs().all(|p| p == (self.rx[0], self.tx[0]))
    }

    /// Bitmask containing every user.
    pub fn all_users(&self) -> u32 {
        full_mask(self.users())
    }
}

pub(crate) fn full_mask(users: usize) -> u32 {
    if users >= 32 {
        u32::MAX
    } else {
        (1u32 << users) - 1
    }
}

impl fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, m) = (self.rx[0], self.tx[0]);
        if self.users() > 1 && self.is_homogeneous() {
            return write!(f, "[({n},{m})^{}]", self.users());
        }
        f.write_str("[")?;
        for (k, (n, m)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "({n},{m})")?;
        }
        f.write_str("]")
    }
}

impl From<AntennaConfig> for String {
    fn from(config: AntennaConfig) -> Self {
        config.to_string()
    }
}

impl TryFrom<String> for AntennaConfig {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl FromStr for AntennaConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser::new(s);
        let pairs = parser.config()?;
        let (rx, tx): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Self::new(rx, tx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    LParen,
    RParen,
    Comma,
    Dot,
    Caret,
    Number(usize),
    End,
}

impl Token {
    fn describe(self) -> String {
        match self {
            Token::Open => "[".into(),
            Token::Close => "]".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::Comma => ",".into(),
            Token::Dot => ".".into(),
            Token::Caret => "^".into(),
            Token::Number(n) => n.to_string(),
            Token::End => "<end of input>".into(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Returns the next token and its starting byte offset.
    fn next(&mut self) -> Result<(Token, usize)> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.src[start..].chars().next() else {
            return Ok((Token::End, start));
        };
        let tok = match c {
            '[' => Token::Open,
            ']' => Token::Close,
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            '.' => Token::Dot,
            '^' => Token::Caret,
            '0'..='9' => {
                let digits: &str = {
                    let rest = &self.src[start..];
                    let end = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
                    &rest[..end]
                };
                self.pos += digits.len();
                let n = digits
                    .parse()
                    .map_err(|_| Error::parse(start, digits, "number too large"))?;
                return Ok((Token::Number(n), start));
            }
            other => {
                return Err(Error::parse(start, other.to_string(), "unexpected character"));
            }
        };
        self.pos += c.len_utf8();
        Ok((tok, start))
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        let (tok, at) = self.next()?;
        if tok == want {
            Ok(())
        } else {
            Err(Error::parse(at, tok.describe(), format!("expected {what}")))
        }
    }

    fn number(&mut self, what: &str) -> Result<(usize, usize)> {
        match self.next()? {
            (Token::Number(n), at) => Ok((n, at)),
            (tok, at) => Err(Error::parse(at, tok.describe(), format!("expected {what}"))),
        }
    }

    fn config(&mut self) -> Result<Vec<(usize, usize)>> {
        self.expect(Token::Open, "`[`")?;
        let mut pairs = Vec::new();
        loop {
            self.expect(Token::LParen, "`(`")?;
            let (n, n_at) = self.number("receive antenna count")?;
            self.expect(Token::Comma, "`,`")?;
            let (m, m_at) = self.number("transmit antenna count")?;
            self.expect(Token::RParen, "`)`")?;
            if n == 0 {
                return Err(Error::parse(n_at, "0", "antenna counts must be at least 1"));
            }
            if m == 0 {
                return Err(Error::parse(m_at, "0", "antenna counts must be at least 1"));
            }
            let (tok, at) = self.next()?;
            let tok = if tok == Token::Caret {
                let (reps, reps_at) = self.number("repetition count")?;
                if reps == 0 || reps > MAX_USERS {
                    return Err(Error::parse(
                        reps_at,
                        reps.to_string(),
                        format!("repetition count must be in 1..={MAX_USERS}"),
                    ));
                }
                pairs.extend(std::iter::repeat_n((n, m), reps));
                self.next()?
            } else {
                pairs.push((n, m));
                (tok, at)
            };
            match tok {
                (Token::Dot, _) => continue,
                (Token::Close, _) => break,
                (tok, at) => {
                    return Err(Error::parse(at, tok.describe(), "expected `.` or `]`"));
                }
            }
        }
        match self.next()? {
            (Token::End, _) => Ok(pairs),
            (tok, at) => Err(Error::parse(at, tok.describe(), "trailing input")),
        }
    }
}
