use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    #[serde(rename = "R")]
    Red,
    #[serde(rename = "B")]
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A balanced red/blue coloring of the cycle on `2n` vertices `0..2n`.
///
/// Serializes as a string such as `"RRBB"`; deserializes from that or from
/// an array like `["R","R","B","B"]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    marks: Vec<Color>,
}

impl Coloring {
    pub fn new(marks: Vec<Color>) -> Result<Self> {
        let red = marks.iter().filter(|&&c| c == Color::Red).count();
        let blue = marks.len() - red;
        if red != blue {
            return Err(Error::UnbalancedColoring { red, blue });
        }
        if marks.is_empty() {
            return Err(Error::param("coloring is empty"));
        }
        Ok(Self { marks })
    }

    /// Uniformly random balanced coloring of a `size`-cycle.
    pub fn random<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<Self> {
        if size == 0 || !size.is_multiple_of(2) {
            return Err(Error::param(format!("cycle size {size} must be even and positive")));
        }
        let mut marks: Vec<Color> = (0..size)
            .map(|i| if i < size / 2 { Color::Red } else { Color::Blue })
            .collect();
        marks.shuffle(rng);
        Self::new(marks)
    }

    /// Every balanced coloring of a `size`-cycle, in lexicographic order of red positions.
    pub fn all_balanced(size: usize) -> Vec<Coloring> {
        if size == 0 || !size.is_multiple_of(2) || size > 24 {
            return Vec::new();
        }
        (0u32..1 << size)
            .filter(|m| m.count_ones() as usize == size / 2)
            .map(|m| Coloring {
                marks: (0..size)
                    .map(|i| if m >> i & 1 == 1 { Color::Red } else { Color::Blue })
                    .collect(),
            })
            .collect()
    }

    /// Number of vertices `2n`.
    pub fn size(&self) -> usize {
        self.marks.len()
    }

    pub fn marks(&self) -> &[Color] {
        &self.marks
    }

    /// Color of vertex `v`, indices taken mod the cycle size.
    pub fn color(&self, v: usize) -> Color {
        self.marks[v % self.marks.len()]
    }

    /// Cyclic distance between two vertices.
    pub fn distance(&self, u: usize, v: usize) -> usize {
        let n = self.size();
        let d = (v + n - u % n) % n;
        d.min(n - d)
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let marks = s
            .trim()
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '\u{b7}')
            .map(|c| match c.to_ascii_uppercase() {
                'R' => Ok(Color::Red),
                'B' => Ok(Color::Blue),
                other => Err(Error::Parse(format!("unexpected color {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Coloring::new(marks)
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.marks.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

impl Serialize for Coloring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Marks(Vec<Color>),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse(),
            Repr::Marks(m) => Coloring::new(m),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// A point of the cycle in half-units: even values are vertices, odd values edge midpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfPosition(pub usize);

impl HalfPosition {
    pub fn vertex(v: usize) -> Self {
        HalfPosition(2 * v)
    }

    pub fn is_vertex(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Position in vertex units, e.g. `2.5` for the edge between vertices 2 and 3.
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vertex() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}
