//! Movies: sequences of elementary cobordisms and Reidemeister moves, with
//! the chain maps they induce on Khovanov complexes.

mod elim;
mod maps;
mod moves;

use serde::{Deserialize, Serialize};

use crate::diagram::Diagram;
use crate::error::{KhError, Result};

pub use maps::{chain_map_of_move, movie_chain_map, MovieMap};
pub use moves::{apply_move, inverse_move, Move, MoveKind, Side};

/// A start diagram with its moves and every intermediate frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Movie {
    moves: Vec<Move>,
    frames: Vec<Diagram>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    start: String,
}

impl Movie {
    pub fn new(start: Diagram, moves: Vec<Move>) -> Result<Movie> {
        let mut frames = vec![start];
        for (k, m) in moves.iter().enumerate() {
            let next = apply_move(frames.last().unwrap(), m).map_err(|e| e.at_move(k))?;
            frames.push(next);
        }
        Ok(Movie { moves, frames })
    }

    pub fn start(&self) -> &Diagram {
        &self.frames[0]
    }

    pub fn end(&self) -> &Diagram {
        self.frames.last().unwrap()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Diagrams before the first move, between moves and after the last.
    pub fn frames(&self) -> &[Diagram] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Appends a move.
    pub fn push(&mut self, m: Move) -> Result<()> {
        let next = apply_move(self.end(), &m).map_err(|e| e.at_move(self.moves.len()))?;
        self.moves.push(m);
        self.frames.push(next);
        Ok(())
    }

    fn count(&self, kind: MoveKind) -> usize {
        self.moves.iter().filter(|m| m.kind == kind).count()
    }

    /// No deaths.
    pub fn is_ribbon(&self) -> bool {
        self.count(MoveKind::Death) == 0
    }

    /// Euler characteristic of the cobordism.
    pub fn euler_char(&self) -> i64 {
        (self.count(MoveKind::Birth) + self.count(MoveKind::Death)) as i64 - self.count(MoveKind::Saddle) as i64
    }

    /// The movie played backwards.
    pub fn reverse(&self) -> Result<Movie> {
        let mut moves = Vec::with_capacity(self.len());
        for (k, m) in self.moves.iter().enumerate().rev() {
            moves.push(inverse_move(&self.frames[k], m).map_err(|e| e.at_move(k))?);
        }
        Movie::new(self.end().clone(), moves)
    }

    /// First line `{"start": "<PD>"}`, then one move per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&Header { start: self.start().to_string() }).unwrap();
        out.push('\n');
        for m in &self.moves {
            out.push_str(&serde_json::to_string(m).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Movie> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| KhError::Parse("empty movie file".into()))?;
        let header: Header = serde_json::from_str(first).map_err(|e| KhError::Parse(format!("line 1: {e}")))?;
        let start: Diagram = header.start.parse()?;
        let moves = lines
            .map(|(n, l)| serde_json::from_str::<Move>(l).map_err(|e| KhError::Parse(format!("line {}: {e}", n + 1))))
            .collect::<Result<Vec<_>>>()?;
        Movie::new(start, moves)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Sign;

    fn sample() -> Movie {
        let t: Diagram = "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3];bp=1".parse().unwrap();
        let mut m = Movie::new(t, vec![Move::r1(Sign::Pos, 3, &[7, 8, 9], true), Move::birth(10), Move::saddle(10, 5, &[11])]).unwrap();
        // first admissible bigon over edge 11
        let r2 = (1..=11)
            .flat_map(|b| [(b, Side::Left), (b, Side::Right)])
            .flat_map(|(b, s)| [false, true].map(|p| Move::r2_intro(11, b, [12, 13, 14, 15, 16, 17], s, p)))
            .find(|mv| apply_move(m.end(), mv).is_ok())
            .unwrap();
        m.push(r2).unwrap();
        m
    }

    #[test]
    fn jsonl_roundtrip_is_exact() {
        let m = sample();
        let text = m.to_jsonl();
        let back = Movie::from_jsonl(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_jsonl(), text);
        assert!(text.lines().nth(1).unwrap().starts_with("{\"move\":\"r1_pos\""));
    }

    #[test]
    fn counts() {
        let m = sample();
        assert_eq!(m.euler_char(), 0);
        assert!(m.is_ribbon());
    }

    #[test]
    fn reverse_returns_to_start() {
        let m = sample();
        let r = m.reverse().unwrap();
        assert!(r.end().is_isomorphic(m.start()));
        assert_eq!(r.end().basepoint(), Some(1));
        assert!(!r.is_ribbon());
    }

    #[test]
    fn errors_carry_move_index() {
        let t: Diagram = "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3];bp=1".parse().unwrap();
        let e = Movie::new(t, vec![Move::birth(7), Move::saddle(1, 7, &[8])]).unwrap_err();
        assert_eq!(e, KhError::BasepointTouched(1).at_move(1));
    }
}
