// Typed client for the modeling service REST + WebSocket API.

export interface PendingSelection {
  kind: string
  query: string
  candidates: string[]
}

export interface AppliedReport {
  rule_id: number
  added_ids: number[]
  requested: number
  shortfall: number
  notes: string
}

export interface TurnOutcome {
  ok: boolean
  messages: string[]
  errors: { message: string; kind?: string; action_index?: number }[]
  pending_selection: PendingSelection | null
  created_rules: number[]
  applied: AppliedReport[]
  reverted: number[]
  intent: string | null
  raw_output: string | null
  failed_operation: string | null
  failed_input: string | null
  failed_action_index: number | null
  advice: string | null
  step_index: number | null
  turn_index: number | null
  replaces_turn: number | null
  instance_count: number
  rule_count: number
}

export interface InstanceRecord {
  id: number
  ingredient: string
  position: [number, number, number]
  quaternion: [number, number, number, number]
}

export interface ViewState {
  colors: Record<string, [number, number, number]>
  highlights: string[]
  render_mode: 'protein' | 'chain' | 'atomistic'
  labeling: boolean
}

export interface IngredientInfo {
  bounding_radius: number
  color: [number, number, number]
  pivot: [number, number, number]
  chains: [number, number, number][][] | null
}

export interface RuleSummary {
  id: number
  type: string
  description: string
  applications: number
}

export interface SceneSnapshot {
  version: number
  seed: number
  instances: InstanceRecord[]
  view: ViewState
  ingredients: Record<string, IngredientInfo>
  session: {
    id: number
    selected_ingredients: string[]
    selected_skeleton: string | null
    pending_selection: PendingSelection | null
    rules: RuleSummary[]
  }
}

export type SceneDelta = {
  type: 'scene-delta'
  added: [number, number][]
  removed: number[]
  view: ViewState
  instance_count: number
}

export type ServerEvent = { type: 'turn'; outcome: TurnOutcome } | SceneDelta

export class ApiClient {
  base: string
  sessionId: number | null = null

  constructor(base: string) {
    this.base = base.replace(/\/$/, '')
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    })
    if (!response.ok) {
      const detail = await response.text()
      throw new Error(`${response.status}: ${detail}`)
    }
    return (await response.json()) as T
  }

  async createSession(seed?: number, backend?: string): Promise<number> {
    const body = await this.post<{ id: number }>('/sessions', { seed, backend })
    this.sessionId = body.id
    return body.id
  }

  message(text: string): Promise<TurnOutcome> {
    return this.post(`/sessions/${this.sessionId}/message`, { text })
  }

  select(candidateIndex: number): Promise<TurnOutcome> {
    return this.post(`/sessions/${this.sessionId}/select`, {
      candidate_index: candidateIndex,
    })
  }

  applyRule(ruleId: number): Promise<TurnOutcome> {
    return this.post(`/sessions/${this.sessionId}/apply-rule`, { rule_id: ruleId })
  }

  revertRule(ruleId: number): Promise<TurnOutcome> {
    return this.post(`/sessions/${this.sessionId}/revert-rule`, { rule_id: ruleId })
  }

  feedback(turnIndex: number, corrected: string, operation?: string): Promise<TurnOutcome> {
    return this.post(`/sessions/${this.sessionId}/feedback`, {
      turn_index: turnIndex,
      corrected_output: corrected,
      operation,
    })
  }

  automatic(description: string): Promise<{ steps: TurnOutcome[]; ok: boolean }> {
    return this.post(`/sessions/${this.sessionId}/automatic`, { description })
  }

  async scene(): Promise<SceneSnapshot> {
    const response = await fetch(`${this.base}/sessions/${this.sessionId}/scene`)
    if (!response.ok) throw new Error(`scene fetch failed: ${response.status}`)
    return (await response.json()) as SceneSnapshot
  }

  eventsUrl(): string {
    const ws = this.base.replace(/^http/, 'ws')
    return `${ws}/sessions/${this.sessionId}/events`
  }
}
