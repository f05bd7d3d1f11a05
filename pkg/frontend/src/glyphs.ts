// Placeholder artwork: every mapping index gets a stable emoji + letter tag.
// Real mnemonic imagery is out of scope; these stand in for the object table.

const EMOJI = [
  "🦅", "🐕", "⚡", "🍔", "🦘", "🌍", "🎈", "🚲", "🌵", "🎺",
  "🐙", "🍄", "🐢", "🧭", "🐳", "🏮", "🪁", "🦎", "🍩", "⛵",
  "🥁", "🦉", "🧸", "🌋", "🚀", "🎳", "🐞", "🍉", "🪐", "🎲",
];

export function glyphFor(index: number): string {
  return EMOJI[index % EMOJI.length];
}

export function labelFor(index: number): string {
  // A, B, ..., Z, A1, B1, ...
  const letter = String.fromCharCode(65 + (index % 26));
  const round = Math.floor(index / 26);
  return round === 0 ? letter : `${letter}${round}`;
}
