"""Count words per line."""

def count_words(text):
    counts = {}
    for line in text.splitlines():
        for word in line.split():
            counts[word] = counts.get(word, 0) + 1
    return counts


def top_word(text):
    counts = count_words(text)
    if not counts:
        return None
    return max(counts, key=counts.get)
