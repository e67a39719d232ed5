//! Tweet text normalization, tokenization, and polarity annotation.
//!
//! Tweets are noisy: elongated words ("pleaseee"), hashtags, handles, URLs,
//! and heavy punctuation. [`normalize`] flattens the noise that carries no
//! signal, [`tokenize`] splits the result into typed tokens, and [`annotate`]
//! attaches lexicon polarity with negation scoping so that "not good" reads
//! as negative rather than positive.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::lexicon::{Lexicon, Polarity};

/// Placeholder every URL is collapsed to during normalization.
pub const URL_SENTINEL: &str = "<url>";

/// How many word tokens a negator keeps in scope.
pub const NEGATION_WINDOW: usize = 3;

/// Token classes produced by [`tokenize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Number,
    Hashtag,
    Mention,
    Url,
    Punct,
}

/// One token of a normalized tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// The slice of normalized text this token came from.
    pub surface: String,
    /// Matching form: diacritics stripped, sigils kept for hashtag/mention.
    pub norm: String,
    pub kind: TokenKind,
    /// Index of this token in the stream, starting at 0.
    pub position: usize,
}

impl Token {
    /// Word-like tokens participate in polarity, cues, and keyword matching.
    pub fn is_wordish(&self) -> bool {
        matches!(self.kind, TokenKind::Word | TokenKind::Hashtag)
    }

    /// Matching key: the norm with any hashtag sigil removed, so "#dirty"
    /// hits the same lexicon entries as "dirty".
    pub fn match_key(&self) -> &str {
        self.norm.strip_prefix('#').unwrap_or(&self.norm)
    }
}

/// A token plus its effective polarity after negation scoping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    pub token: Token,
    /// Polarity after any negation flip has been applied.
    pub polarity: Polarity,
    /// True when the token sat inside an open negation window, whether or
    /// not the flip changed its polarity.
    pub negated: bool,
}

/// Normalize raw tweet text.
///
/// Lowercases, replaces URLs with [`URL_SENTINEL`], breaks intra-word hyphens
/// into spaces, squeezes letter elongations (three or more repeats become
/// two), and collapses whitespace runs. The function is idempotent:
/// `normalize(normalize(t)) == normalize(t)`.
pub fn normalize(text: &str) -> String {
    let lowered: String = text.chars().flat_map(char::to_lowercase).collect();
    let chars: Vec<char> = lowered.chars().collect();

    // Replace http(s) URLs with the sentinel, consuming to the next space.
    let mut replaced = String::with_capacity(lowered.len());
    let mut i = 0;
    while i < chars.len() {
        if starts_with(&chars, i, "http://") || starts_with(&chars, i, "https://") {
            replaced.push_str(URL_SENTINEL);
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
        } else {
            replaced.push(chars[i]);
            i += 1;
        }
    }

    // A hyphen flanked by letters is a soft word break ("e-ticket", "on-board").
    let chars: Vec<char> = replaced.chars().collect();
    let mut dehyphenated = String::with_capacity(replaced.len());
    for (i, &c) in chars.iter().enumerate() {
        let between_letters = c == '-'
            && i > 0
            && chars[i - 1].is_alphabetic()
            && chars.get(i + 1).is_some_and(|n| n.is_alphabetic());
        dehyphenated.push(if between_letters { ' ' } else { c });
    }

    // Squeeze elongated letters: "pleaseeee" -> "pleasee".
    let mut squeezed = String::with_capacity(dehyphenated.len());
    let mut run_char = '\0';
    let mut run_len = 0usize;
    for c in dehyphenated.chars() {
        if c == run_char && c.is_alphabetic() {
            run_len += 1;
        } else {
            run_char = c;
            run_len = 1;
        }
        if run_len <= 2 {
            squeezed.push(c);
        }
    }

    squeezed.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn starts_with(chars: &[char], at: usize, prefix: &str) -> bool {
    prefix
        .chars()
        .enumerate()
        .all(|(k, p)| chars.get(at + k) == Some(&p))
}

/// Split normalized text into typed tokens.
///
/// All input characters except whitespace land in some token, and `norm` is
/// never empty for word or number tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if starts_with(&chars, i, URL_SENTINEL) {
            i += URL_SENTINEL.chars().count();
            TokenKind::Url
        } else if chars[i] == '#' && chars.get(i + 1).is_some_and(|c| is_word_char(*c)) {
            i += 1;
            consume_word(&chars, &mut i);
            TokenKind::Hashtag
        } else if chars[i] == '@' && chars.get(i + 1).is_some_and(|c| is_word_char(*c)) {
            i += 1;
            consume_word(&chars, &mut i);
            TokenKind::Mention
        } else if chars[i].is_ascii_digit() {
            consume_number(&chars, &mut i);
            // Digits running straight into letters ("2pm", "12a") read as one
            // word, not a number followed by a word.
            if chars.get(i).is_some_and(|c| c.is_alphabetic()) {
                consume_word(&chars, &mut i);
                TokenKind::Word
            } else {
                TokenKind::Number
            }
        } else if is_word_char(chars[i]) {
            consume_word(&chars, &mut i);
            TokenKind::Word
        } else {
            while i < chars.len()
                && !chars[i].is_whitespace()
                && !is_word_char(chars[i])
                && chars[i] != '#'
                && chars[i] != '@'
                && !starts_with(&chars, i, URL_SENTINEL)
            {
                i += 1;
            }
            TokenKind::Punct
        };
        let surface: String = chars[start..i].iter().collect();
        let norm = match kind {
            TokenKind::Word | TokenKind::Number | TokenKind::Hashtag | TokenKind::Mention => {
                strip_diacritics(&surface)
            }
            TokenKind::Url | TokenKind::Punct => surface.clone(),
        };
        tokens.push(Token {
            surface,
            norm,
            kind,
            position: tokens.len(),
        });
    }
    tokens
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn consume_word(chars: &[char], i: &mut usize) {
    while *i < chars.len() {
        let c = chars[*i];
        if is_word_char(c) {
            *i += 1;
        } else if c == '\'' && chars.get(*i + 1).is_some_and(|n| is_word_char(*n)) {
            // Keep contractions like "don't" whole.
            *i += 1;
        } else {
            break;
        }
    }
}

fn consume_number(chars: &[char], i: &mut usize) {
    let digits = |chars: &[char], i: &mut usize| {
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(chars, i);
    // Date-ish and fraction-ish groups stay one token: 05/01/2022, 2/3, 12-01-2022.
    while matches!(chars.get(*i), Some('/') | Some('-'))
        && chars.get(*i + 1).is_some_and(|c| c.is_ascii_digit())
    {
        *i += 1;
        digits(chars, i);
    }
}

fn strip_diacritics(s: &str) -> String {
    s.nfkd()
        .filter(|c| !unicode_normalization::char::is_combining_mark(*c))
        .collect()
}

/// Attach polarity to each token, applying negation scoping.
///
/// A negator opens a window over the next [`NEGATION_WINDOW`] word tokens or
/// until punctuation, whichever comes first. Inside a window, positive flips
/// to negative and negative flips to neutral; each token is flipped at most
/// once, by the nearest preceding negator. The output always has exactly one
/// entry per input token.
pub fn annotate(tokens: &[Token], lexicon: &Lexicon) -> Vec<AnnotatedToken> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut window = 0usize;
    for token in tokens {
        let mut polarity = Polarity::Neutral;
        let mut negated = false;
        match token.kind {
            TokenKind::Punct => window = 0,
            TokenKind::Word | TokenKind::Hashtag => {
                let key = token.match_key();
                let base = lexicon.polarity_of(key);
                if window > 0 {
                    negated = true;
                    polarity = flip(base);
                    window -= 1;
                } else {
                    polarity = base;
                }
                if lexicon.is_negator(key) {
                    // The nearest negator wins: restart rather than extend.
                    window = NEGATION_WINDOW;
                }
            }
            // Numbers, mentions, and URLs neither consume nor close a window.
            TokenKind::Number | TokenKind::Mention | TokenKind::Url => {}
        }
        out.push(AnnotatedToken {
            token: token.clone(),
            polarity,
            negated,
        });
    }
    out
}

fn flip(polarity: Polarity) -> Polarity {
    match polarity {
        Polarity::Positive => Polarity::Negative,
        Polarity::Negative | Polarity::Neutral => Polarity::Neutral,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::from_tables(
            "good\tpositive\nclean\tpositive\ndirty\tnegative\nleakage\tnegative\nbad\tnegative\n",
            "please add\n",
            "not\nno\nnever\nwithout\n",
            "complaint\tcomplaint\nsuggestion\tsuggestion\nappreciation\tappreciation\n",
        )
        .unwrap()
    }

    #[test]
    fn normalize_lowercases_and_collapses_whitespace() {
        assert_eq!(
            normalize("Water   LEAKAGE\t at  Bhandup"),
            "water leakage at bhandup"
        );
    }

    #[test]
    fn normalize_replaces_urls_with_sentinel() {
        assert_eq!(normalize("see https://t.co/AbC123 now"), "see <url> now");
        assert_eq!(normalize("http://x.example/path?q=1"), "<url>");
    }

    #[test]
    fn normalize_squeezes_elongations_to_two() {
        assert_eq!(normalize("pleaseeee helppp"), "pleasee helpp");
        // Doubles stay, and digit runs are untouched.
        assert_eq!(normalize("good 000111"), "good 000111");
    }

    #[test]
    fn normalize_breaks_intraword_hyphens() {
        assert_eq!(normalize("e-ticket on-board"), "e ticket on board");
        // Hyphens next to digits are kept (dates, fractions).
        assert_eq!(normalize("12-01-2022 2/3"), "12-01-2022 2/3");
    }

    #[test]
    fn normalize_is_idempotent_on_fixed_samples() {
        for text in [
            "Waterrr LEAKAGE at Bhandup!!! https://t.co/x #dirty @railmin e-ticket",
            "  plain   text  ",
            "crowded-coach b2, pnr 8234567890",
        ] {
            let once = normalize(text);
            assert_eq!(normalize(&once), once);
        }
    }

    #[test]
    fn tokenize_assigns_expected_kinds() {
        let tokens = tokenize(&normalize(
            "@RailMinIndia water leakage at bhandup platform no 2/3 #dirty https://t.co/x !",
        ));
        let kinds: Vec<(&str, TokenKind)> =
            tokens.iter().map(|t| (t.norm.as_str(), t.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                ("@railminindia", TokenKind::Mention),
                ("water", TokenKind::Word),
                ("leakage", TokenKind::Word),
                ("at", TokenKind::Word),
                ("bhandup", TokenKind::Word),
                ("platform", TokenKind::Word),
                ("no", TokenKind::Word),
                ("2/3", TokenKind::Number),
                ("#dirty", TokenKind::Hashtag),
                ("<url>", TokenKind::Url),
                ("!", TokenKind::Punct),
            ]
        );
    }

    #[test]
    fn tokenize_keeps_alphanumeric_ids_as_words() {
        let tokens = tokenize("coach b2 seat 12a");
        let kinds: Vec<(&str, TokenKind)> =
            tokens.iter().map(|t| (t.norm.as_str(), t.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                ("coach", TokenKind::Word),
                ("b2", TokenKind::Word),
                ("seat", TokenKind::Word),
                ("12a", TokenKind::Word),
            ]
        );
    }

    #[test]
    fn tokenize_positions_are_sequential() {
        let tokens = tokenize("a b , c 12");
        for (i, t) in tokens.iter().enumerate() {
            assert_eq!(t.position, i);
        }
    }

    #[test]
    fn tokenize_strips_diacritics_in_norm_only() {
        let tokens = tokenize("café");
        assert_eq!(tokens[0].surface, "café");
        assert_eq!(tokens[0].norm, "cafe");
    }

    #[test]
    fn annotate_scopes_negation_to_three_words() {
        let tokens = tokenize("not a b good");
        let annotated = annotate(&tokens, &lex());
        // "good" is the third word after "not": still inside the window.
        assert_eq!(annotated[3].polarity, Polarity::Negative);
        assert!(annotated[3].negated);

        let tokens = tokenize("not a b c good");
        let annotated = annotate(&tokens, &lex());
        // Fourth word after the negator: window exhausted.
        assert_eq!(annotated[4].polarity, Polarity::Positive);
        assert!(!annotated[4].negated);
    }

    #[test]
    fn annotate_window_closes_at_punctuation() {
        let tokens = tokenize("not generated . good");
        let annotated = annotate(&tokens, &lex());
        assert_eq!(annotated[3].polarity, Polarity::Positive);
        assert!(!annotated[3].negated);
    }

    #[test]
    fn annotate_flips_negative_to_neutral() {
        let tokens = tokenize("not dirty seat");
        let annotated = annotate(&tokens, &lex());
        assert_eq!(annotated[1].polarity, Polarity::Neutral);
        assert!(annotated[1].negated);
        assert_eq!(annotated[2].polarity, Polarity::Neutral);
        assert!(annotated[2].negated);
    }

    #[test]
    fn annotate_numbers_do_not_consume_window_slots() {
        let tokens = tokenize("not 12345 6789012345 @x good");
        let annotated = annotate(&tokens, &lex());
        let good = annotated.iter().find(|a| a.token.norm == "good").unwrap();
        assert_eq!(good.polarity, Polarity::Negative);
        assert!(good.negated);
    }

    #[test]
    fn annotate_nearest_negator_wins_once() {
        // "never not good": "not" sits in "never"'s window (flip 1), then
        // reopens its own window; "good" is flipped once, by "not".
        let tokens = tokenize("never not good");
        let annotated = annotate(&tokens, &lex());
        assert_eq!(annotated[2].polarity, Polarity::Negative);
        assert!(annotated[2].negated);
    }

    #[test]
    fn annotate_hashtags_match_without_sigil() {
        let tokens = tokenize("#dirty coach");
        let annotated = annotate(&tokens, &lex());
        assert_eq!(annotated[0].polarity, Polarity::Negative);
    }

    #[test]
    fn annotate_output_is_same_length_as_input() {
        let tokens = tokenize(&normalize("No water! not clean, never again http://x #bad"));
        assert_eq!(annotate(&tokens, &lex()).len(), tokens.len());
    }
}
