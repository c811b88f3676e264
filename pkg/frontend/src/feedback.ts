// Feedback dialog: shows the raw backend output of a failed (or disliked)
// turn and collects a correction. Rule-extraction failures get a rule-type
// picker; format failures get a JSON editor validated live with the same
// grammar the service enforces, so invalid corrections never leave the page.

import type { TurnOutcome } from './api'
import {
  RULE_TYPE_NAMES,
  validateIntentDocument,
  validateParameterPatch,
} from './grammar'

export class FeedbackDialog {
  root: HTMLElement
  onSubmit: (turnIndex: number, corrected: string, operation?: string) => void
  private outcome: TurnOutcome | null = null

  constructor(
    root: HTMLElement,
    onSubmit: (turnIndex: number, corrected: string, operation?: string) => void,
  ) {
    this.root = root
    this.onSubmit = onSubmit
    this.root.classList.add('feedback-dialog', 'hidden')
  }

  isOpen(): boolean {
    return !this.root.classList.contains('hidden')
  }

  open(outcome: TurnOutcome): void {
    this.outcome = outcome
    this.root.classList.remove('hidden')
    this.root.textContent = ''

    const title = document.createElement('h3')
    title.textContent = `Correct turn ${outcome.turn_index}`
    this.root.appendChild(title)

    if (outcome.raw_output) {
      const raw = document.createElement('pre')
      raw.className = 'raw-output'
      raw.textContent = outcome.raw_output
      this.root.appendChild(raw)
    }

    const operation = outcome.failed_operation ?? undefined
    const submit = document.createElement('button')
    submit.className = 'feedback-submit'
    submit.textContent = 'Submit correction'

    if (operation === 'rule_extraction') {
      const picker = document.createElement('select')
      picker.className = 'rule-type-picker'
      for (const name of RULE_TYPE_NAMES) {
        const option = document.createElement('option')
        option.value = name
        option.textContent = name
        picker.appendChild(option)
      }
      this.root.appendChild(picker)
      submit.addEventListener('click', () => {
        this.submit(picker.value, operation)
      })
    } else {
      const editor = document.createElement('textarea')
      editor.className = 'json-editor'
      editor.rows = 8
      editor.value = outcome.raw_output ?? ''
      const status = document.createElement('div')
      status.className = 'validation-status'
      const validate = () => {
        const errors =
          operation === 'parameter_adjustment'
            ? validateParameterPatch(editor.value)
            : validateIntentDocument(editor.value)
        if (errors.length === 0) {
          status.textContent = 'valid'
          status.classList.remove('invalid')
          submit.disabled = false
        } else {
          status.textContent = errors
            .map((e) => `${e.kind} at ${e.path}: ${e.message}`)
            .join('\n')
          status.classList.add('invalid')
          submit.disabled = true
        }
      }
      editor.addEventListener('input', validate)
      validate()
      this.root.append(editor, status)
      submit.addEventListener('click', () => {
        this.submit(editor.value, operation)
      })
    }

    const cancel = document.createElement('button')
    cancel.className = 'feedback-cancel'
    cancel.textContent = 'Cancel'
    cancel.addEventListener('click', () => this.close())
    this.root.append(submit, cancel)
  }

  private submit(corrected: string, operation?: string): void {
    const turn = this.outcome?.turn_index
    if (turn === null || turn === undefined) return
    this.close()
    this.onSubmit(turn, corrected, operation)
  }

  close(): void {
    this.root.classList.add('hidden')
    this.root.textContent = ''
    this.outcome = null
  }
}
