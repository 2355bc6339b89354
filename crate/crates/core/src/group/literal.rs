//! Text form of sets: `n=<rank>; {e1,e2,...}` or `n=<rank>; mask=<hex>`.
//!
//! Elements are decimal or `0x` hex. In the mask form bit `i` of the hex
//! number is element `i`; it is written most-significant digit first and
//! zero-padded to `max(1, 2^n / 4)` digits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Element, GroupCtx, SetF2};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let end = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let (digits, radix) = if self.rest().starts_with("0x") || self.rest().starts_with("0X") {
            self.pos += 2;
            (self.take_while(|c| c.is_ascii_hexdigit()), 16)
        } else {
            (self.take_while(|c| c.is_ascii_digit()), 10)
        };
        if digits.is_empty() {
            self.pos = start;
            return self.err("expected an integer");
        }
        u64::from_str_radix(digits, radix).map_err(|e| Error::Parse {
            offset: start,
            message: e.to_string(),
        })
    }
}

/// Parses a set literal.
pub fn parse_set(src: &str) -> Result<SetF2> {
    let mut cur = Cursor { src, pos: 0 };
    cur.expect("n")?;
    cur.expect("=")?;
    let rank_at = {
        cur.skip_ws();
        cur.pos
    };
    let rank = cur.integer()?;
    let ctx = u32::try_from(rank)
        .map_err(|_| Error::RankTooLarge {
            rank: u32::MAX,
            cap: super::max_rank(),
        })
        .and_then(GroupCtx::new)
        .map_err(|e| Error::Parse {
            offset: rank_at,
            message: e.to_string(),
        })?;
    cur.expect(";")?;
    let set = if cur.eat("{") {
        let mut set = SetF2::empty(ctx);
        if !cur.eat("}") {
            loop {
                cur.skip_ws();
                let at = cur.pos;
                let value = cur.integer()?;
                let e = ctx.element(value).map_err(|e| Error::Parse {
                    offset: at,
                    message: e.to_string(),
                })?;
                if set.contains(e) {
                    cur.pos = at;
                    return cur.err(format!("duplicate element {value}"));
                }
                set.insert_unchecked(e);
                if cur.eat("}") {
                    break;
                }
                cur.expect(",")?;
            }
        }
        set
    } else if cur.eat("mask") {
        cur.expect("=")?;
        cur.skip_ws();
        if cur.rest().starts_with("0x") || cur.rest().starts_with("0X") {
            cur.pos += 2;
        }
        let at = cur.pos;
        let digits = cur.take_while(|c| c.is_ascii_hexdigit());
        if digits.is_empty() {
            return cur.err("expected hex digits");
        }
        parse_mask(ctx, digits).map_err(|message| Error::Parse {
            offset: at,
            message,
        })?
    } else {
        return cur.err("expected `{` or `mask=`");
    };
    cur.skip_ws();
    if !cur.rest().is_empty() {
        return cur.err("trailing input");
    }
    Ok(set)
}

fn parse_mask(ctx: GroupCtx, digits: &str) -> std::result::Result<SetF2, String> {
    let mut words = vec![0u64; (ctx.order() / 64).max(1)];
    for (i, c) in digits.bytes().rev().enumerate() {
        let nibble = (c as char).to_digit(16).expect("hex digit") as u64;
        if nibble == 0 {
            continue;
        }
        let bit = 4 * i;
        if bit >= ctx.order() || (nibble >> (ctx.order() - bit).min(4)) != 0 {
            return Err(format!("mask has bits beyond element {}", ctx.order() - 1));
        }
        words[bit / 64] |= nibble << (bit % 64);
    }
    SetF2::from_words(ctx, &words).map_err(|e| e.to_string())
}

impl SetF2 {
    /// The `mask=` form of this set.
    pub fn to_mask_literal(&self) -> String {
        let digits = (self.ctx().order() / 4).max(1);
        let mut hex = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = 4 * d;
            let nibble = (self.words()[bit / 64] >> (bit % 64)) & 0xf;
            hex.push(char::from_digit(nibble as u32, 16).expect("nibble"));
        }
        format!("n={}; mask={}", self.rank(), hex)
    }
}

impl fmt::Display for SetF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}; {{", self.rank())?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", e.0)?;
        }
        f.write_str("}")
    }
}

impl FromStr for SetF2 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_set(s)
    }
}

impl Serialize for SetF2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SetF2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Element {
    /// Parses a decimal or `0x` hex element.
    pub fn parse_in(ctx: GroupCtx, src: &str) -> Result<Element> {
        let mut cur = Cursor { src, pos: 0 };
        let value = cur.integer()?;
        cur.skip_ws();
        if !cur.rest().is_empty() {
            return cur.err("trailing input");
        }
        ctx.element(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_both_forms() {
        let a: SetF2 = "n=3; {0,1,2,4}".parse().unwrap();
        assert_eq!(a.iter().map(|e| e.0).collect::<Vec<_>>(), vec![0, 1, 2, 4]);
        let b: SetF2 = "n=3;{0x4, 2 ,1,0}".parse().unwrap();
        assert_eq!(a, b);
        let c: SetF2 = "n=3; mask=17".parse().unwrap();
        assert_eq!(a, c);
        let d: SetF2 = "n=3; mask=0x17".parse().unwrap();
        assert_eq!(a, d);
        let e: SetF2 = "n=2; {}".parse().unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn emits_canonical_forms() {
        let a: SetF2 = "n=3;{4,2,1,0}".parse().unwrap();
        assert_eq!(a.to_string(), "n=3; {0,1,2,4}");
        assert_eq!(a.to_mask_literal(), "n=3; mask=17");
        let g: SetF2 = "n=0; {0}".parse().unwrap();
        assert_eq!(g.to_mask_literal(), "n=0; mask=1");
        let big: SetF2 = "n=7; {0,127}".parse().unwrap();
        assert_eq!(
            big.to_mask_literal(),
            "n=7; mask=80000000000000000000000000000001"
        );
    }

    #[test]
    fn errors_name_offsets() {
        match "n=3; {0,9}".parse::<SetF2>() {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 8),
            other => panic!("unexpected {other:?}"),
        }
        match "n=3; {0,1".parse::<SetF2>() {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 9),
            other => panic!("unexpected {other:?}"),
        }
        match "n=3; {1,1}".parse::<SetF2>() {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 8);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!("n=2; mask=1ff".parse::<SetF2>().is_err());
        assert!("n=2; mask=1f".parse::<SetF2>().is_err());
        assert!("n=99; {0}".parse::<SetF2>().is_err());
        assert!("m=2; {0}".parse::<SetF2>().is_err());
        assert!("n=2; {0} x".parse::<SetF2>().is_err());
    }

    fn arb_literal_set() -> impl Strategy<Value = SetF2> {
        (0u32..=8).prop_flat_map(|n| {
            proptest::collection::btree_set(0u32..(1 << n), 0..=(1usize << n)).prop_map(move |s| {
                SetF2::from_elements(GroupCtx::new(n).unwrap(), s.into_iter().map(Element)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn literal_round_trips(a in arb_literal_set()) {
            let listed = a.to_string();
            prop_assert_eq!(&listed.parse::<SetF2>().unwrap(), &a);
            prop_assert_eq!(listed.parse::<SetF2>().unwrap().to_string(), listed);
            let masked = a.to_mask_literal();
            prop_assert_eq!(&masked.parse::<SetF2>().unwrap(), &a);
            prop_assert_eq!(masked.parse::<SetF2>().unwrap().to_mask_literal(), masked);
        }
    }
}
