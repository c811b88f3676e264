// Client-side validation of the two JSON grammars, mirroring the service,
// so the feedback editor can reject bad corrections without a round trip.

export interface GrammarError {
  kind: 'parse' | 'array-shape' | 'data-type' | 'unknown-key' | 'domain'
  path: string
  message: string
}

const INTENT_KEYS = new Set([
  'selectIngredient', 'selectSkeleton', 'createRule', 'editRule', 'saveModel',
  'loadModel', 'updatePivot', 'updatePosition', 'highlightIngredient',
  'modifyColor', 'changeMode', 'labeling',
])

const PATCH_KEYS = new Set([
  'elements', 'distance', 'collisionDetection', 'space', 'alignDirection',
  'length', 'curve', 'tweaking', 'std',
])

const RENDER_MODES = new Set([
  'protein', 'protein level', 'chain', 'chain level', 'atomistic',
  'atomistic level', 'residue', 'residue level', 'amino acid', 'amino acid level',
])

const COLOR_NAMES = new Set([
  'red', 'green', 'blue', 'yellow', 'orange', 'purple', 'cyan', 'magenta',
  'white', 'black', 'gray', 'brown', 'pink', 'lime', 'navy', 'gold',
])

export const RULE_TYPE_NAMES = [
  'parent-child (distance)',
  'parent-child (relative)',
  'siblings',
  'siblings-parent',
  'fill',
  'connection',
]

function extractObject(raw: string): Record<string, unknown> | null {
  let idx = raw.indexOf('{')
  while (idx !== -1) {
    // Find the balanced top-level object starting here, respecting strings.
    let depth = 0
    let inString = false
    let escaped = false
    for (let i = idx; i < raw.length; i++) {
      const ch = raw[i]
      if (inString) {
        if (escaped) escaped = false
        else if (ch === '\\') escaped = true
        else if (ch === '"') inString = false
        continue
      }
      if (ch === '"') inString = true
      else if (ch === '{') depth++
      else if (ch === '}') {
        depth--
        if (depth === 0) {
          try {
            const value = JSON.parse(raw.slice(idx, i + 1))
            if (value && typeof value === 'object' && !Array.isArray(value)) {
              return value as Record<string, unknown>
            }
          } catch {
            // fall through to the next candidate brace
          }
          break
        }
      }
    }
    idx = raw.indexOf('{', idx + 1)
  }
  return null
}

function isInt(v: unknown): v is number {
  return typeof v === 'number' && Number.isInteger(v)
}

function nameList(
  value: unknown, path: string, recordKey: string, errors: GrammarError[],
): void {
  if (!Array.isArray(value)) {
    errors.push({
      kind: 'array-shape', path,
      message: `expected an array of {${recordKey}: name} records`,
    })
    return
  }
  value.forEach((item, i) => {
    if (typeof item === 'string') return
    if (item && typeof item === 'object' && !Array.isArray(item)) {
      const record = item as Record<string, unknown>
      if (!(recordKey in record)) {
        errors.push({ kind: 'domain', path: `${path}/${i}`, message: `missing ${recordKey}` })
      } else if (typeof record[recordKey] !== 'string') {
        errors.push({
          kind: 'data-type', path: `${path}/${i}/${recordKey}`, message: 'expected string',
        })
      }
    } else {
      errors.push({ kind: 'data-type', path: `${path}/${i}`, message: 'expected record' })
    }
  })
}

function colorValue(value: unknown, path: string, errors: GrammarError[]): void {
  if (typeof value === 'string') {
    if (!COLOR_NAMES.has(value.trim().toLowerCase())) {
      errors.push({ kind: 'domain', path, message: `unknown color name '${value}'` })
    }
    return
  }
  if (!Array.isArray(value) || value.length !== 3) {
    errors.push({ kind: 'array-shape', path, message: 'expected [r, g, b]' })
    return
  }
  value.forEach((comp, i) => {
    if (typeof comp !== 'number') {
      errors.push({ kind: 'data-type', path: `${path}/${i}`, message: 'expected number' })
    } else if (comp < 0 || comp > 1) {
      errors.push({ kind: 'domain', path: `${path}/${i}`, message: 'component outside [0, 1]' })
    }
  })
}

function pivotRecord(value: unknown, path: string, errors: GrammarError[]): void {
  if (!value || typeof value !== 'object' || Array.isArray(value)) {
    errors.push({ kind: 'data-type', path, message: 'expected {chainId, residueId}' })
    return
  }
  const record = value as Record<string, unknown>
  for (const key of ['chainId', 'residueId']) {
    if (!(key in record)) {
      errors.push({ kind: 'domain', path: `${path}/${key}`, message: `missing ${key}` })
    } else if (!isInt(record[key])) {
      errors.push({ kind: 'data-type', path: `${path}/${key}`, message: 'expected integer' })
    } else if ((record[key] as number) < 0) {
      errors.push({ kind: 'domain', path: `${path}/${key}`, message: 'index must be >= 0' })
    }
  }
}

export function validateIntentDocument(raw: string): GrammarError[] {
  const data = extractObject(raw)
  if (data === null) {
    return [{ kind: 'parse', path: '/', message: 'no parseable JSON object found' }]
  }
  const errors: GrammarError[] = []
  const keys = Object.keys(data)
  if (keys.length === 0) {
    return [{ kind: 'domain', path: '/', message: 'empty intent: no fields present' }]
  }
  for (const key of keys) {
    const path = `/${key}`
    const value = data[key]
    if (!INTENT_KEYS.has(key)) {
      errors.push({ kind: 'unknown-key', path, message: `unknown key '${key}'` })
      continue
    }
    switch (key) {
      case 'selectIngredient':
      case 'highlightIngredient':
        nameList(value, path, 'ingredient', errors)
        break
      case 'selectSkeleton':
        nameList(value, path, 'skeleton', errors)
        break
      case 'createRule':
      case 'editRule':
        if (typeof value !== 'string') {
          errors.push({ kind: 'data-type', path, message: 'expected string' })
        } else if (!value.trim()) {
          errors.push({ kind: 'domain', path, message: 'empty rule description' })
        }
        break
      case 'saveModel':
      case 'loadModel':
      case 'labeling':
        if (typeof value !== 'boolean') {
          errors.push({ kind: 'data-type', path, message: 'expected boolean' })
        }
        break
      case 'updatePivot':
        pivotRecord(value, path, errors)
        break
      case 'updatePosition':
        if (!Array.isArray(value)) {
          errors.push({ kind: 'array-shape', path, message: 'expected a two-record array' })
        } else if (value.length !== 2) {
          errors.push({
            kind: 'array-shape', path,
            message: `expected exactly 2 records, found ${value.length}`,
          })
        }
        break
      case 'modifyColor':
        if (!Array.isArray(value)) {
          errors.push({ kind: 'array-shape', path, message: 'expected an array of records' })
        } else {
          value.forEach((item, i) => {
            if (!item || typeof item !== 'object' || Array.isArray(item)) {
              errors.push({ kind: 'data-type', path: `${path}/${i}`, message: 'expected record' })
              return
            }
            const record = item as Record<string, unknown>
            if (typeof record.ingredient !== 'string') {
              errors.push({
                kind: 'data-type', path: `${path}/${i}/ingredient`, message: 'expected string',
              })
            }
            colorValue(record.color, `${path}/${i}/color`, errors)
          })
        }
        break
      case 'changeMode':
        if (typeof value !== 'string') {
          errors.push({ kind: 'data-type', path, message: 'expected string' })
        } else if (!RENDER_MODES.has(value.trim().toLowerCase())) {
          errors.push({ kind: 'domain', path, message: `unknown render mode '${value}'` })
        }
        break
    }
  }
  return errors
}

export function validateParameterPatch(raw: string): GrammarError[] {
  const data = extractObject(raw)
  if (data === null) {
    return [{ kind: 'parse', path: '/', message: 'no parseable JSON object found' }]
  }
  const errors: GrammarError[] = []
  const keys = Object.keys(data)
  if (keys.length === 0) {
    return [{ kind: 'domain', path: '/', message: 'empty patch: no fields present' }]
  }
  for (const key of keys) {
    const path = `/${key}`
    const value = data[key]
    if (!PATCH_KEYS.has(key)) {
      errors.push({ kind: 'unknown-key', path, message: `unknown key '${key}'` })
      continue
    }
    switch (key) {
      case 'elements':
        if (!isInt(value)) errors.push({ kind: 'data-type', path, message: 'expected integer' })
        else if (value <= 0) errors.push({ kind: 'domain', path, message: 'must be positive' })
        break
      case 'space':
        if (!isInt(value)) errors.push({ kind: 'data-type', path, message: 'expected integer' })
        else if (value <= 0 || value > 100) {
          errors.push({ kind: 'domain', path, message: 'must be in (0, 100]' })
        }
        break
      case 'distance':
      case 'std':
        if (typeof value !== 'number') {
          errors.push({ kind: 'data-type', path, message: 'expected number' })
        } else if (value < 0) errors.push({ kind: 'domain', path, message: 'must be >= 0' })
        break
      case 'length':
        if (typeof value !== 'number') {
          errors.push({ kind: 'data-type', path, message: 'expected number' })
        } else if (value <= 0) errors.push({ kind: 'domain', path, message: 'must be positive' })
        break
      case 'collisionDetection':
        if (typeof value !== 'boolean') {
          errors.push({ kind: 'data-type', path, message: 'expected boolean' })
        }
        break
      case 'alignDirection':
        if (typeof value !== 'string') {
          errors.push({ kind: 'data-type', path, message: 'expected string' })
        } else {
          const norm = value.trim().toLowerCase().replace(/[_ ]/g, '-')
          if (norm !== 'normal' && norm !== 'inverse-normal') {
            errors.push({ kind: 'domain', path, message: `unknown direction '${value}'` })
          }
        }
        break
      case 'curve':
      case 'tweaking':
        if (typeof value !== 'string') {
          errors.push({ kind: 'data-type', path, message: 'expected string' })
        }
        break
    }
  }
  if ('elements' in data && 'space' in data) {
    errors.push({
      kind: 'domain', path: '/space',
      message: 'elements and space are mutually exclusive',
    })
  }
  return errors
}

export function isRuleTypeName(text: string): boolean {
  const normalized = text.toLowerCase().replace(/[^a-z]/g, '')
  return RULE_TYPE_NAMES.some((n) => n.replace(/[^a-z]/g, '') === normalized)
}
