// Chat panel: turn history, candidate buttons for pending selections, and
// per-rule apply/revert buttons. All state comes from server outcomes; the
// panel never updates optimistically.

import type { PendingSelection, RuleSummary, TurnOutcome } from './api'

export interface ChatHandlers {
  onSend: (text: string) => void
  onSelect: (candidateIndex: number) => void
  onApply: (ruleId: number) => void
  onRevert: (ruleId: number) => void
  onFeedback: (outcome: TurnOutcome) => void
}

export class ChatPanel {
  root: HTMLElement
  log: HTMLElement
  input: HTMLInputElement
  rulesBar: HTMLElement
  handlers: ChatHandlers

  constructor(root: HTMLElement, handlers: ChatHandlers) {
    this.root = root
    this.handlers = handlers
    this.log = document.createElement('div')
    this.log.className = 'chat-log'
    this.rulesBar = document.createElement('div')
    this.rulesBar.className = 'rules-bar'
    const form = document.createElement('form')
    form.className = 'chat-form'
    this.input = document.createElement('input')
    this.input.type = 'text'
    this.input.placeholder = 'Describe a modeling step… (advice:/auto: prefixes work)'
    const send = document.createElement('button')
    send.type = 'submit'
    send.textContent = 'Send'
    form.append(this.input, send)
    form.addEventListener('submit', (event) => {
      event.preventDefault()
      const text = this.input.value.trim()
      if (!text) return
      this.input.value = ''
      this.addBubble('user', text)
      this.handlers.onSend(text)
    })
    root.append(this.log, this.rulesBar, form)
  }

  addBubble(role: 'user' | 'system' | 'error', text: string): HTMLElement {
    const el = document.createElement('div')
    el.className = `bubble bubble-${role}`
    el.textContent = text
    this.log.appendChild(el)
    this.log.scrollTop = this.log.scrollHeight
    return el
  }

  renderOutcome(outcome: TurnOutcome): void {
    for (const message of outcome.messages) this.addBubble('system', message)
    for (const error of outcome.errors) {
      this.addBubble('error', `${error.kind ?? 'error'}: ${error.message}`)
    }
    if (outcome.pending_selection) {
      this.renderCandidates(outcome.pending_selection)
    }
    if (!outcome.ok && (outcome.failed_operation || outcome.raw_output)) {
      const btn = document.createElement('button')
      btn.className = 'feedback-button'
      btn.textContent = 'Correct this…'
      btn.addEventListener('click', () => this.handlers.onFeedback(outcome))
      this.log.appendChild(btn)
    }
  }

  renderCandidates(pending: PendingSelection): void {
    const wrap = document.createElement('div')
    wrap.className = 'candidates'
    pending.candidates.forEach((name, index) => {
      const btn = document.createElement('button')
      btn.className = 'candidate-button'
      btn.textContent = name
      btn.addEventListener('click', () => {
        wrap.remove()
        this.handlers.onSelect(index)
      })
      wrap.appendChild(btn)
    })
    this.log.appendChild(wrap)
  }

  renderRules(rules: RuleSummary[]): void {
    this.rulesBar.textContent = ''
    for (const rule of rules) {
      const row = document.createElement('div')
      row.className = 'rule-row'
      const label = document.createElement('span')
      label.textContent = `rule ${rule.id} (${rule.type}) ×${rule.applications}`
      label.title = rule.description
      const apply = document.createElement('button')
      apply.className = 'apply-button'
      apply.textContent = 'apply rule'
      apply.addEventListener('click', () => this.handlers.onApply(rule.id))
      const revert = document.createElement('button')
      revert.className = 'revert-button'
      revert.textContent = 'revert'
      revert.disabled = rule.applications === 0
      revert.addEventListener('click', () => this.handlers.onRevert(rule.id))
      row.append(label, apply, revert)
      this.rulesBar.appendChild(row)
    }
  }

  candidateButtons(): HTMLButtonElement[] {
    return Array.from(this.log.querySelectorAll('button.candidate-button'))
  }
}
