use alloc::string::String;
use alloc::vec::Vec;

use super::Token;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Space,
    Letter,
    Digit,
    Punct,
}

fn classify(c: char) -> Class {
    if c.is_whitespace() {
        Class::Space
    } else if c.is_numeric() {
        Class::Digit
    } else if c.is_alphabetic() {
        Class::Letter
    } else {
        Class::Punct
    }
}

/// Splits on whitespace and at letter/digit/punctuation boundaries. Every
/// punctuation character is a token of its own.
///
/// ```
/// use recipe_iot_core::corpus::tokenize;
/// let words: Vec<_> = tokenize("Preheat to 400F.").into_iter().map(|t| t.text).collect();
/// assert_eq!(words, ["Preheat", "to", "400", "F", "."]);
/// ```
pub fn tokenize(s: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_class = Class::Space;
    let mut start = 0;

    let mut flush = |buf: &mut String, start: usize, end: usize| {
        if !buf.is_empty() {
            tokens.push(Token::new(core::mem::take(buf), start, end));
        }
    };

    let mut pos = 0;
    for c in s.chars() {
        let class = classify(c);
        let continues = class == current_class && matches!(class, Class::Letter | Class::Digit);
        if !continues {
            flush(&mut current, start, pos);
            start = pos;
        }
        if class != Class::Space {
            current.push(c);
        }
        current_class = class;
        pos += 1;
    }
    flush(&mut current, start, pos);
    tokens
}
