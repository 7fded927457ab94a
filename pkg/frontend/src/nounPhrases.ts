/** Noun-phrase extraction from caption sentences. */

import nlp from 'compromise'

/**
 * Extract the noun phrases of a caption: ordered by first appearance,
 * lowercased, deduplicated. Pronouns are dropped; an empty or noun-free
 * caption yields an empty list.
 */
export function extractNounPhrases(caption: string): string[] {
  if (!caption.trim()) return []
  const nouns = nlp(caption).match('#Noun').not('#Pronoun').out('array') as string[]
  const seen = new Set<string>()
  const out: string[] = []
  for (const raw of nouns) {
    const phrase = raw.toLowerCase().replace(/[^\p{L}\p{N}\s-]/gu, '').trim()
    if (phrase && !seen.has(phrase)) {
      seen.add(phrase)
      out.push(phrase)
    }
  }
  return out
}
