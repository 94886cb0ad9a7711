//! Rule-based English lemmatizer.
//!
//! An irregular-form table is consulted first, then suffix rules for plural
//! `-s`/`-es`/`-ies` and verbal `-ed`/`-ing`. Input must be lowercase.

fn irregular(word: &str) -> Option<&'static str> {
    Some(match word {
        "am" | "is" | "are" | "was" | "were" | "been" | "being" => "be",
        "has" | "had" | "having" => "have",
        "does" | "did" | "done" | "doing" => "do",
        "goes" | "went" | "gone" => "go",
        "known" | "knew" => "know",
        "made" => "make",
        "created" | "creating" | "creates" => "create",
        "took" | "taken" => "take",
        "gave" | "given" => "give",
        "got" | "gotten" => "get",
        "said" => "say",
        "saw" | "seen" => "see",
        "came" => "come",
        "found" => "find",
        "thought" => "think",
        "told" => "tell",
        "felt" => "feel",
        "kept" => "keep",
        "left" => "leave",
        "bought" => "buy",
        "brought" => "bring",
        "built" => "build",
        "began" | "begun" => "begin",
        "wrote" | "written" => "write",
        "ran" => "run",
        "sent" => "send",
        "spent" => "spend",
        "paid" => "pay",
        "lost" => "lose",
        "held" => "hold",
        "chose" | "chosen" => "choose",
        "grew" | "grown" => "grow",
        "shown" => "show",
        "children" => "child",
        "men" => "man",
        "women" => "woman",
        "feet" => "foot",
        "teeth" => "tooth",
        "mice" => "mouse",
        "geese" => "goose",
        "data" => "datum",
        "criteria" => "criterion",
        "phenomena" => "phenomenon",
        "movies" => "movie",
        "cookies" => "cookie",
        "ties" | "tied" => "tie",
        "lies" | "lied" => "lie",
        "dies" | "died" => "die",
        "pies" => "pie",
        "better" | "best" => "good",
        _ => return None,
    })
}

/// Words the suffix rules must leave alone.
fn invariant(word: &str) -> bool {
    matches!(
        word,
        "its" | "this" | "thus" | "yes" | "news" | "series" | "species" | "always" | "perhaps"
            | "whereas" | "alas" | "atlas" | "canvas" | "christmas" | "bias" | "chaos"
            | "physics" | "mathematics" | "economics" | "statistics" | "politics" | "lens"
            | "during" | "nothing" | "something" | "anything" | "everything" | "morning"
            | "evening" | "ceiling" | "wedding" | "pudding" | "speed" | "need" | "hundred"
            | "indeed" | "united" | "sacred" | "naked" | "wicked"
    )
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn has_vowel(s: &[u8]) -> bool {
    s.iter().any(|&c| is_vowel(c) || c == b'y')
}

fn is_consonant(c: u8) -> bool {
    c.is_ascii_lowercase() && !is_vowel(c)
}

/// Lemma of a lowercase token.
pub fn lemmatize(word: &str) -> String {
    if let Some(lemma) = irregular(word) {
        return lemma.to_owned();
    }
    if invariant(word) || !word.is_ascii() || word.len() <= 3 {
        return word.to_owned();
    }
    if let Some(s) = strip_plural(word) {
        return s;
    }
    if let Some(s) = strip_verbal(word) {
        return s;
    }
    word.to_owned()
}

fn strip_plural(word: &str) -> Option<String> {
    let b = word.as_bytes();
    if !word.ends_with('s') || word.ends_with("ss") || word.ends_with("us") || word.ends_with("is")
    {
        return None;
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.len() >= 2 {
            return Some(format!("{stem}y"));
        }
        return None;
    }
    if let Some(stem) = word.strip_suffix("es") {
        if stem.ends_with("sh")
            || stem.ends_with("ch")
            || stem.ends_with('x')
            || stem.ends_with('z')
            || stem.ends_with("ss")
        {
            return Some(stem.to_owned());
        }
    }
    let stem = &word[..word.len() - 1];
    if has_vowel(&b[..b.len() - 1]) {
        Some(stem.to_owned())
    } else {
        None
    }
}

fn strip_verbal(word: &str) -> Option<String> {
    if word.ends_with("eed") {
        return None;
    }
    if let Some(stem) = word.strip_suffix("ied") {
        if stem.len() >= 2 {
            return Some(format!("{stem}y"));
        }
        return None;
    }
    let stem = word.strip_suffix("ed").or_else(|| word.strip_suffix("ing"))?;
    let s = stem.as_bytes();
    if s.len() < 2 || !has_vowel(s) {
        return None;
    }
    let n = s.len();
    let last = s[n - 1];
    if n >= 3 && last == s[n - 2] && is_consonant(last) && !matches!(last, b'l' | b's' | b'z') {
        return Some(stem[..n - 1].to_owned());
    }
    if needs_final_e(s) {
        return Some(format!("{stem}e"));
    }
    Some(stem.to_owned())
}

fn needs_final_e(s: &[u8]) -> bool {
    let n = s.len();
    let last = s[n - 1];
    let prev = s[n - 2];
    let ends = |suffix: &str| s.ends_with(suffix.as_bytes());
    if matches!(last, b'v' | b'u') {
        return true;
    }
    if ends("iz") || ends("yz") || ends("uir") || ends("dg") || ends("rg") {
        return true;
    }
    if is_vowel(prev) && matches!(last, b'c' | b's') {
        return true;
    }
    if n >= 3 && is_consonant(s[n - 3]) && (ends("at") || ends("ar") || ends("ir") || ends("ur") || ends("ag")) {
        return true;
    }
    if last == b'l' && is_consonant(prev) && prev != b'l' && prev != b'r' {
        return true;
    }
    // Short consonant-vowel-consonant stems: "rat" -> "rate", "us" -> "use".
    let cvc_tail = is_consonant(last) && !matches!(last, b'w' | b'x' | b'y') && is_vowel(prev);
    (n == 3 && cvc_tail && is_consonant(s[0])) || (n == 2 && cvc_tail)
}
