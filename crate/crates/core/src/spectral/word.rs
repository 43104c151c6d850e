use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::hermite::HEADROOM;

/// The two generators of the operator words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LetterKind {
    /// `∂/∂x_j`
    Grad,
    /// multiplication by `x_j`
    X,
}

/// One generator acting on a single axis (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub kind: LetterKind,
    pub axis: usize,
}

impl Letter {
    pub fn grad(axis: usize) -> Self {
        Letter { kind: LetterKind::Grad, axis }
    }

    pub fn x(axis: usize) -> Self {
        Letter { kind: LetterKind::X, axis }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            LetterKind::Grad => "D",
            LetterKind::X => "X",
        };
        write!(f, "{}{}", tag, self.axis + 1)
    }
}

/// Product of letters `P(α) = A_1 A_2 ⋯ A_k`. The rightmost letter acts
/// first.
///
/// Text form lists the letters left to right separated by spaces or commas,
/// each letter being `D` (or `GRAD`) or `X` followed by a 1-based axis, e.g.
/// `"D1 X1"` for `∂₁ x₁`. The empty string is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PWord {
    letters: Vec<Letter>,
}

impl PWord {
    /// Longest word the tabulated headroom supports.
    pub const MAX_ORDER: usize = HEADROOM;

    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.len() > Self::MAX_ORDER {
            return Err(Error::WordTooLong { order: letters.len(), headroom: Self::MAX_ORDER });
        }
        Ok(PWord { letters })
    }

    pub fn identity() -> Self {
        PWord::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn order(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Rejects letters acting on axes `≥ d`.
    pub fn check_axes(&self, d: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.axis >= d) {
            Some(l) => Err(Error::AxisOutOfRange { axis: l.axis, d }),
            None => Ok(()),
        }
    }

    /// Letters per axis; the extra degrees the word can reach on each axis.
    pub fn reach(&self, d: usize) -> Vec<usize> {
        let mut r = vec![0; d];
        for l in &self.letters {
            if l.axis < d {
                r[l.axis] += 1;
            }
        }
        r
    }

    /// Every word of exactly `order` letters over `d` axes, in lexicographic
    /// order with `D` before `X` and lower axes first.
    pub fn all_of_order(order: usize, d: usize) -> Result<Vec<PWord>> {
        if order > Self::MAX_ORDER {
            return Err(Error::WordTooLong { order, headroom: Self::MAX_ORDER });
        }
        let alphabet: Vec<Letter> =
            (0..d).map(Letter::grad).chain((0..d).map(Letter::x)).collect();
        let mut words = vec![Vec::new()];
        for _ in 0..order {
            words = words
                .into_iter()
                .flat_map(|w: Vec<Letter>| {
                    alphabet.iter().map(move |l| {
                        let mut w = w.clone();
                        w.push(*l);
                        w
                    })
                })
                .collect();
        }
        Ok(words.into_iter().map(|letters| PWord { letters }).collect())
    }
}

impl fmt::Display for PWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for PWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let upper = tok.to_ascii_uppercase();
            let (kind, rest) = if let Some(r) = upper.strip_prefix("GRAD") {
                (LetterKind::Grad, r)
            } else if let Some(r) = upper.strip_prefix('D') {
                (LetterKind::Grad, r)
            } else if let Some(r) = upper.strip_prefix('X') {
                (LetterKind::X, r)
            } else {
                return Err(invalid("word", format!("unknown letter `{tok}`")));
            };
            let axis: usize = rest
                .parse()
                .map_err(|_| invalid("word", format!("letter `{tok}` needs a 1-based axis")))?;
            if axis == 0 {
                return Err(invalid("word", format!("letter `{tok}`: axes start at 1")));
            }
            letters.push(Letter { kind, axis: axis - 1 });
        }
        PWord::new(letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let w: PWord = "D1, x2 GRAD1".parse().unwrap();
        assert_eq!(w.letters(), &[Letter::grad(0), Letter::x(1), Letter::grad(0)]);
        assert_eq!(w.to_string(), "D1 X2 D1");
        assert_eq!(w.to_string().parse::<PWord>().unwrap(), w);
        assert!("".parse::<PWord>().unwrap().is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!("Y1".parse::<PWord>().is_err());
        assert!("D0".parse::<PWord>().is_err());
        assert!("D".parse::<PWord>().is_err());
        let long = vec!["X1"; 9].join(" ");
        assert_eq!(long.parse::<PWord>().unwrap_err(), Error::WordTooLong { order: 9, headroom: 8 });
    }

    #[test]
    fn axis_check_and_reach() {
        let w = PWord::new(vec![Letter::grad(2), Letter::x(2), Letter::x(0)]).unwrap();
        assert_eq!(w.check_axes(2).unwrap_err(), Error::AxisOutOfRange { axis: 2, d: 2 });
        assert!(w.check_axes(3).is_ok());
        assert_eq!(w.reach(3), vec![1, 0, 2]);
    }

    #[test]
    fn enumerates_words() {
        assert_eq!(PWord::all_of_order(0, 2).unwrap(), vec![PWord::identity()]);
        let w = PWord::all_of_order(2, 1).unwrap();
        let s: Vec<String> = w.iter().map(|w| w.to_string()).collect();
        assert_eq!(s, ["D1 D1", "D1 X1", "X1 D1", "X1 X1"]);
        assert_eq!(PWord::all_of_order(3, 2).unwrap().len(), 64);
    }
}
