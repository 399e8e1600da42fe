//! Git-style content hashes: SHA-256 over `"blob <len>\0" ‖ content`, the
//! object id git uses for a file in a SHA-256 repository.

use sha2::{Digest, Sha256};

pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_git_sha256_object_ids() {
        // `git init --object-format=sha256 && printf '' | git hash-object --stdin`
        assert_eq!(
            blob_hash(b""),
            "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
        assert_eq!(
            blob_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }
}
